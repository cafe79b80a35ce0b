use alloc::vec::Vec;
use rand::Rng;

use crate::rng::{stream, uniform, Purpose};

type Point = (f64, f64);

fn dist(a: Point, b: Point) -> f64 {
    libm::hypot(a.0 - b.0, a.1 - b.1)
}

fn lerp(a: Point, b: Point, f: f64) -> Point {
    (a.0 + (b.0 - a.0) * f, a.1 + (b.1 - a.1) * f)
}

/// A closed waypoint loop traversed once per `period` slots: the user
/// dwells at each waypoint, then moves to the next at constant speed.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilitySchedule {
    pub waypoints: Vec<Point>,
    /// Dwell time at each waypoint, in slots.
    pub dwell: Vec<f64>,
    /// Travel time of the leg leaving each waypoint, in slots.
    pub travel: Vec<f64>,
    pub period: f64,
}

impl MobilitySchedule {
    /// Fit a loop over `waypoints` into `period` slots at `speed` metres per
    /// slot, spreading the spare time evenly as dwell. If the loop is too
    /// long for the period the speed is raised to fit.
    pub fn fit(waypoints: Vec<Point>, speed: f64, period: f64) -> Self {
        let m = waypoints.len();
        let legs: Vec<f64> = (0..m).map(|i| dist(waypoints[i], waypoints[(i + 1) % m])).collect();
        let length: f64 = legs.iter().sum();
        let mut travel: Vec<f64> = if speed > 0.0 { legs.iter().map(|l| l / speed).collect() } else { alloc::vec![0.0; m] };
        let total: f64 = travel.iter().sum();
        if speed <= 0.0 && length > 0.0 || total > period {
            let s = length / period;
            travel = legs.iter().map(|l| l / s).collect();
        }
        let spare = period - travel.iter().sum::<f64>();
        let dwell = alloc::vec![spare.max(0.0) / m as f64; m];
        Self { waypoints, dwell, travel, period }
    }

    /// Position at time `t` slots, periodic in `period`.
    pub fn position_at(&self, t: f64) -> Point {
        let mut tau = t - libm::floor(t / self.period) * self.period;
        let m = self.waypoints.len();
        for i in 0..m {
            if tau < self.dwell[i] {
                return self.waypoints[i];
            }
            tau -= self.dwell[i];
            if tau < self.travel[i] {
                return lerp(self.waypoints[i], self.waypoints[(i + 1) % m], tau / self.travel[i]);
            }
            tau -= self.travel[i];
        }
        self.waypoints[0]
    }
}

/// A user's path: a synthetic loop or a replayed trace.
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    Loop(MobilitySchedule),
    /// `(t, x, y)` samples sorted by time; linear in between, held at the ends.
    Track(Vec<(f64, f64, f64)>),
}

impl Trajectory {
    pub fn position_at(&self, t: f64) -> Point {
        match self {
            Trajectory::Loop(s) => s.position_at(t),
            Trajectory::Track(samples) => {
                let Some(first) = samples.first() else {
                    return (0.0, 0.0);
                };
                if t <= first.0 {
                    return (first.1, first.2);
                }
                let i = samples.partition_point(|s| s.0 <= t);
                if i >= samples.len() {
                    let last = samples[samples.len() - 1];
                    return (last.1, last.2);
                }
                let (a, b) = (samples[i - 1], samples[i]);
                let f = (t - a.0) / (b.0 - a.0);
                lerp((a.1, a.2), (b.1, b.2), f)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityConfig {
    pub users: usize,
    pub radius: f64,
    pub waypoints: usize,
    /// Metres per slot.
    pub speed: f64,
    /// Slots per loop.
    pub period: f64,
}

/// Uniform point in a disk of radius `r` centred on `c`.
pub(crate) fn disk_point<R: Rng + ?Sized>(rng: &mut R, c: Point, r: f64) -> Point {
    let rho = r * libm::sqrt(rng.random::<f64>());
    let phi = uniform(rng, 0.0, 2.0 * core::f64::consts::PI);
    (c.0 + rho * libm::cos(phi), c.1 + rho * libm::sin(phi))
}

fn clamp_to_disk(p: Point, r: f64) -> Point {
    let d = libm::hypot(p.0, p.1);
    if d <= r {
        p
    } else {
        (p.0 * r / d, p.1 * r / d)
    }
}

/// One loop per user: a home point uniform in the cell and further
/// waypoints close enough to home that the loop fits in one period.
pub fn generate_mobility(cfg: &MobilityConfig, seed: u64) -> Vec<MobilitySchedule> {
    let m = cfg.waypoints.max(1);
    let roam = cfg.speed * cfg.period / (2.0 * m as f64);
    (0..cfg.users)
        .map(|u| {
            let mut rng = stream(seed, Purpose::Mobility, &[u as u64]);
            let home = disk_point(&mut rng, (0.0, 0.0), cfg.radius);
            let mut pts = alloc::vec![home];
            for _ in 1..m {
                pts.push(clamp_to_disk(disk_point(&mut rng, home, roam), cfg.radius));
            }
            MobilitySchedule::fit(pts, cfg.speed, cfg.period)
        })
        .collect()
}
