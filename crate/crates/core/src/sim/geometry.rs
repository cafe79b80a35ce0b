use alloc::vec::Vec;

use crate::data::Trajectory;

pub type Point = (f64, f64);

/// Shortest link length used in path loss, in metres.
pub const MIN_DISTANCE_M: f64 = 1.0;

pub fn distance(a: Point, b: Point) -> f64 {
    libm::hypot(a.0 - b.0, a.1 - b.1)
}

/// Index of the nearest point; lowest index on ties.
pub fn nearest(points: &[Point], p: Point) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &q) in points.iter().enumerate() {
        let d = distance(p, q);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Advance `pos` towards `target` by at most `speed * dt`.
pub fn step_towards(pos: Point, target: Point, speed: f64, dt: f64) -> Point {
    let d = distance(pos, target);
    let step = speed * dt;
    if d <= step || d == 0.0 {
        target
    } else {
        let f = step / d;
        (pos.0 + (target.0 - pos.0) * f, pos.1 + (target.1 - pos.1) * f)
    }
}

/// Square grid over `[-r, r]²` with row-major cell codes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub radius: f64,
    pub pitch: f64,
    pub cols: usize,
}

impl Grid {
    pub fn new(radius: f64, pitch: f64) -> Self {
        let cols = libm::ceil(2.0 * radius / pitch).max(1.0) as usize;
        Self { radius, pitch, cols }
    }

    pub fn cells(&self) -> usize {
        self.cols * self.cols
    }

    pub fn code(&self, p: Point) -> usize {
        let idx = |v: f64| {
            let i = libm::floor((v + self.radius) / self.pitch);
            (i.max(0.0) as usize).min(self.cols - 1)
        };
        idx(p.1) * self.cols + idx(p.0)
    }

    pub fn center(&self, code: usize) -> Point {
        let code = code.min(self.cells() - 1);
        let (row, col) = (code / self.cols, code % self.cols);
        (
            -self.radius + (col as f64 + 0.5) * self.pitch,
            -self.radius + (row as f64 + 0.5) * self.pitch,
        )
    }
}

/// Serving RRH of every user at time `t`.
pub fn associations(rrhs: &[Point], trajectories: &[Trajectory], t: f64) -> Vec<usize> {
    trajectories.iter().map(|tr| nearest(rrhs, tr.position_at(t))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepping() {
        assert_eq!(step_towards((0.0, 0.0), (30.0, 40.0), 5.0, 1.0), (3.0, 4.0));
        assert_eq!(step_towards((1.0, 1.0), (30.0, 40.0), 0.0, 1.0), (1.0, 1.0));
        assert_eq!(step_towards((0.0, 0.0), (3.0, 4.0), 10.0, 1.0), (3.0, 4.0));
    }

    #[test]
    fn grid_codes_round_trip() {
        let g = Grid::new(1000.0, 50.0);
        assert_eq!(g.cols, 40);
        assert_eq!(g.code((-1000.0, -1000.0)), 0);
        assert_eq!(g.code((1000.0, 1000.0)), 1599);
        assert_eq!(g.code((-960.0, -1000.0)), 0);
        assert_eq!(g.code((-940.0, -1000.0)), 1);
        for code in [0, 17, 40, 811, 1599] {
            assert_eq!(g.code(g.center(code)), code);
        }
    }

    #[test]
    fn nearest_breaks_ties_low() {
        let pts = [(1.0, 0.0), (-1.0, 0.0), (0.0, 5.0)];
        assert_eq!(nearest(&pts, (0.0, 0.0)), 0);
        assert_eq!(nearest(&pts, (0.0, 4.0)), 2);
    }
}
