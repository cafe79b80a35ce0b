use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{config_err, EsnError};
use crate::rng::uniform;

/// Law of the cycle weights. Every supported value lies in `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightDistribution {
    /// Every cycle weight equals `a`.
    PointMass(f64),
    /// `+a` or `-a` with probability one half each.
    SymmetricBinary(f64),
    Uniform { lo: f64, hi: f64 },
}

impl WeightDistribution {
    pub fn validate(&self) -> Result<(), EsnError> {
        let inside = |v: f64| v.is_finite() && v.abs() < 1.0;
        match *self {
            Self::PointMass(a) if inside(a) => Ok(()),
            Self::SymmetricBinary(a) if inside(a) && a >= 0.0 => Ok(()),
            Self::Uniform { lo, hi } if inside(lo) && inside(hi) && lo < hi => Ok(()),
            _ => Err(config_err("weight distribution support must lie in (-1, 1)")),
        }
    }

    /// `E[w^k]`
    pub fn moment(&self, k: u32) -> f64 {
        match *self {
            Self::PointMass(a) => libm::pow(a, k as f64),
            Self::SymmetricBinary(a) => {
                if k.is_multiple_of(2) {
                    libm::pow(a, k as f64)
                } else {
                    0.0
                }
            }
            Self::Uniform { lo, hi } => {
                let e = (k + 1) as f64;
                (libm::pow(hi, e) - libm::pow(lo, e)) / (e * (hi - lo))
            }
        }
    }

    /// Largest `|w|` in the support.
    pub fn max_abs(&self) -> f64 {
        match *self {
            Self::PointMass(a) | Self::SymmetricBinary(a) => a.abs(),
            Self::Uniform { lo, hi } => lo.abs().max(hi.abs()),
        }
    }

    pub fn is_zero_mean(&self) -> bool {
        match *self {
            Self::PointMass(a) => a == 0.0,
            Self::SymmetricBinary(_) => true,
            Self::Uniform { lo, hi } => lo == -hi,
        }
    }

    /// `w > 0` almost surely.
    pub fn is_strictly_positive(&self) -> bool {
        match *self {
            Self::PointMass(a) => a > 0.0,
            Self::SymmetricBinary(_) => false,
            Self::Uniform { lo, .. } => lo >= 0.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::PointMass(a) => a,
            Self::SymmetricBinary(a) => {
                if rng.random::<bool>() {
                    a
                } else {
                    -a
                }
            }
            Self::Uniform { lo, hi } => uniform(rng, lo, hi),
        }
    }
}

fn sample_cycle<R: Rng + ?Sized>(units: usize, spec: &WeightDistribution, rng: &mut R) -> Vec<f64> {
    (0..units).map(|_| spec.sample(rng)).collect()
}

fn cycle_to_dense(cycle: &[f64]) -> DMatrix<f64> {
    let w = cycle.len();
    let mut m = DMatrix::zeros(w, w);
    for (i, &v) in cycle.iter().enumerate() {
        m[(i, (i + w - 1) % w)] = v;
    }
    m
}

/// Cycle reservoir: row `i` holds its weight in column `i - 1 (mod W)`.
pub fn build_cycle_reservoir(units: usize, spec: WeightDistribution, seed: u64) -> Result<DMatrix<f64>, EsnError> {
    if units == 0 {
        return Err(config_err("cycle reservoir needs at least one unit"));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(cycle_to_dense(&sample_cycle(units, &spec, &mut rng)))
}

/// Reservoir states (one column per step) and the targets they should map to.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingWindow {
    pub states: DMatrix<f64>,
    pub targets: DMatrix<f64>,
}

impl TrainingWindow {
    pub fn new(states: DMatrix<f64>, targets: DMatrix<f64>) -> Result<Self, EsnError> {
        if states.ncols() != targets.ncols() {
            return Err(EsnError::Dimension {
                what: "training window columns",
                expected: states.ncols(),
                found: targets.ncols(),
            });
        }
        if states.ncols() == 0 {
            return Err(config_err("training window is empty"));
        }
        Ok(Self { states, targets })
    }
}

/// Ridge readout `W_out = S·Vᵀ·(V·Vᵀ + λ²I)⁻¹`, obtained by a Cholesky solve
/// of the regularized normal equations on the reservoir side.
pub fn ridge_train(window: &TrainingWindow, ridge_lambda: f64) -> Result<DMatrix<f64>, EsnError> {
    let v = &window.states;
    let units = v.nrows();
    let mut gram = v * v.transpose();
    let lambda2 = ridge_lambda * ridge_lambda;
    for i in 0..units {
        gram[(i, i)] += lambda2;
    }
    let scale = (0..units).map(|i| gram[(i, i)].abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(EsnError::NumericalRank);
    }
    let chol = gram.cholesky().ok_or(EsnError::NumericalRank)?;
    let l = chol.l_dirty();
    let min_pivot = (0..units).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
    if min_pivot <= scale * 1e-13 {
        return Err(EsnError::NumericalRank);
    }
    let rhs = v * window.targets.transpose();
    Ok(chol.solve(&rhs).transpose())
}

/// Scalar-input mobility predictor on a cycle reservoir with a linear update
/// `v ← W·v + W_in·m` and readout `s = W_out·v` of the next `horizon` codes.
#[derive(Debug, Clone)]
pub struct MobilityEsn {
    input_weights: DVector<f64>,
    cycle: Vec<f64>,
    output_weights: DMatrix<f64>,
    state: DVector<f64>,
    ridge_lambda: f64,
    horizon: usize,
    trained: bool,
}

impl MobilityEsn {
    /// Input weights uniform in `(-1, 1)`, cycle weights drawn from `spec`,
    /// readout zero until trained.
    pub fn new(
        units: usize,
        spec: WeightDistribution,
        horizon: usize,
        ridge_lambda: f64,
        seed: u64,
    ) -> Result<Self, EsnError> {
        if units == 0 || horizon == 0 {
            return Err(config_err("mobility reservoir and horizon must be positive"));
        }
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cycle = sample_cycle(units, &spec, &mut rng);
        let input_weights = DVector::from_fn(units, |_, _| uniform(&mut rng, -1.0, 1.0));
        Self::from_parts(input_weights, cycle, horizon, ridge_lambda)
    }

    pub fn from_parts(
        input_weights: DVector<f64>,
        cycle: Vec<f64>,
        horizon: usize,
        ridge_lambda: f64,
    ) -> Result<Self, EsnError> {
        let units = cycle.len();
        if input_weights.len() != units {
            return Err(EsnError::Dimension {
                what: "mobility input weights",
                expected: units,
                found: input_weights.len(),
            });
        }
        if units == 0 || horizon == 0 {
            return Err(config_err("mobility reservoir and horizon must be positive"));
        }
        Ok(Self {
            input_weights,
            cycle,
            output_weights: DMatrix::zeros(horizon, units),
            state: DVector::zeros(units),
            ridge_lambda,
            horizon,
            trained: false,
        })
    }

    pub fn units(&self) -> usize {
        self.cycle.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.state
    }

    pub fn input_weights(&self) -> &DVector<f64> {
        &self.input_weights
    }

    pub fn cycle_weights(&self) -> &[f64] {
        &self.cycle
    }

    pub fn reservoir_matrix(&self) -> DMatrix<f64> {
        cycle_to_dense(&self.cycle)
    }

    pub fn output_weights(&self) -> &DMatrix<f64> {
        &self.output_weights
    }

    pub fn set_output_weights(&mut self, w: DMatrix<f64>) -> Result<(), EsnError> {
        if w.nrows() != self.horizon || w.ncols() != self.units() {
            return Err(EsnError::Dimension {
                what: "mobility output weights",
                expected: self.horizon * self.units(),
                found: w.nrows() * w.ncols(),
            });
        }
        self.output_weights = w;
        self.trained = true;
        Ok(())
    }

    pub fn reset_state(&mut self) {
        self.state.fill(0.0);
    }

    pub fn update_state(&mut self, m: f64) -> &DVector<f64> {
        let w = self.units();
        let prev_last = self.state[w - 1];
        // row i reads column i-1, so walk downwards to reuse the old value
        for i in (1..w).rev() {
            self.state[i] = self.cycle[i] * self.state[i - 1] + self.input_weights[i] * m;
        }
        self.state[0] = self.cycle[0] * prev_last + self.input_weights[0] * m;
        &self.state
    }

    pub fn predict(&self) -> DVector<f64> {
        &self.output_weights * &self.state
    }

    /// Fit the readout on a window using the configured ridge strength.
    pub fn train(&mut self, window: &TrainingWindow) -> Result<(), EsnError> {
        if window.states.nrows() != self.units() || window.targets.nrows() != self.horizon {
            return Err(EsnError::Dimension {
                what: "training window rows",
                expected: self.units(),
                found: window.states.nrows(),
            });
        }
        let w = ridge_train(window, self.ridge_lambda)?;
        self.set_output_weights(w)
    }

    /// Drive a reset copy of the reservoir with `inputs` and return the
    /// state after every step as columns.
    pub fn collect_states(&self, inputs: &[f64]) -> DMatrix<f64> {
        let mut esn = self.clone();
        esn.reset_state();
        let mut out = DMatrix::zeros(self.units(), inputs.len());
        for (t, &m) in inputs.iter().enumerate() {
            out.set_column(t, esn.update_state(m));
        }
        out
    }
}

/// Window pairing the state after input `t` with inputs `t+1..=t+horizon`.
pub(crate) fn forecasting_window(
    states: &DMatrix<f64>,
    inputs: &[f64],
    horizon: usize,
    max_columns: usize,
) -> Option<TrainingWindow> {
    let n = inputs.len();
    if n <= horizon {
        return None;
    }
    let usable = n - horizon;
    let cols = usable.min(max_columns);
    let start = usable - cols;
    let mut s = DMatrix::zeros(states.nrows(), cols);
    let mut y = DMatrix::zeros(horizon, cols);
    for c in 0..cols {
        let t = start + c;
        s.set_column(c, &states.column(t));
        for h in 0..horizon {
            y[(h, c)] = inputs[t + 1 + h];
        }
    }
    TrainingWindow::new(s, y).ok()
}

#[allow(dead_code)]
pub(crate) fn zero_vec(n: usize) -> Vec<f64> {
    vec![0.0; n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_unit_cycle_definition() {
        let m = build_cycle_reservoir(2, WeightDistribution::PointMass(0.5), 1).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
    }

    #[test]
    fn cycle_is_scaled_permutation() {
        let m = build_cycle_reservoir(4, WeightDistribution::PointMass(-0.3), 1).unwrap();
        assert_eq!(m.iter().filter(|v| **v != 0.0).count(), 4);
        assert_eq!(m.rank(1e-12), 4);
        for i in 0..4 {
            assert_eq!(m.row(i).iter().filter(|v| **v != 0.0).count(), 1);
            assert_eq!(m.column(i).iter().filter(|v| **v != 0.0).count(), 1);
        }
        assert_eq!(m[(0, 3)], -0.3);
    }

    #[test]
    fn cycle_is_deterministic_per_seed() {
        let a = build_cycle_reservoir(10, WeightDistribution::SymmetricBinary(0.9), 42).unwrap();
        let b = build_cycle_reservoir(10, WeightDistribution::SymmetricBinary(0.9), 42).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().filter(|v| **v != 0.0).all(|v| v.abs() == 0.9));
    }

    #[test]
    fn cycle_rejects_bad_input() {
        assert!(build_cycle_reservoir(0, WeightDistribution::PointMass(0.5), 1).is_err());
        assert!(build_cycle_reservoir(3, WeightDistribution::PointMass(1.0), 1).is_err());
        assert!(build_cycle_reservoir(3, WeightDistribution::Uniform { lo: 0.5, hi: 0.2 }, 1).is_err());
    }

    #[test]
    fn linear_two_step_recurrence() {
        let mut esn = MobilityEsn::from_parts(DVector::from_vec(vec![1.0, 1.0]), vec![0.5, 0.5], 1, 0.0).unwrap();
        assert_eq!(esn.update_state(0.0).as_slice(), &[0.0, 0.0]);
        esn.update_state(1.0);
        let s = esn.update_state(1.0);
        assert_eq!(s.as_slice(), &[1.5, 1.5]);
    }

    #[test]
    fn untrained_readout_predicts_zero() {
        let mut esn = MobilityEsn::new(6, WeightDistribution::PointMass(0.9), 3, 0.5, 9).unwrap();
        esn.update_state(3.0);
        assert!(esn.predict().iter().all(|v| *v == 0.0));
        assert!(!esn.is_trained());
    }

    #[test]
    fn identity_readout_returns_state() {
        let mut esn = MobilityEsn::new(4, WeightDistribution::PointMass(0.7), 4, 0.5, 2).unwrap();
        esn.set_output_weights(DMatrix::identity(4, 4)).unwrap();
        esn.update_state(2.0);
        esn.update_state(-1.0);
        assert_eq!(esn.predict(), esn.state().clone());
    }

    #[test]
    fn ridge_exact_interpolation() {
        let v = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, -1.0, 0.0, 1.0, 3.0, 1.0, -2.0, 0.5]);
        let s = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, -1.0, 0.0, 4.0]);
        let w = ridge_train(&TrainingWindow::new(v.clone(), s.clone()).unwrap(), 0.0).unwrap();
        let fit = &w * &v;
        assert!((fit - s).abs().max() < 1e-8);
        let w = ridge_train(
            &TrainingWindow::new(DMatrix::from_element(1, 1, 2.0), DMatrix::from_element(1, 1, 4.0)).unwrap(),
            0.0,
        )
        .unwrap();
        assert!((w[(0, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ridge_matches_hand_normal_equations() {
        // 2 units, 3 samples, λ = 0.5
        let v = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 3.0]);
        let s = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 2.0]);
        let w = ridge_train(&TrainingWindow::new(v, s).unwrap(), 0.5).unwrap();
        // G = VVᵀ + 0.25 I = [[5.25, 2], [2, 10.25]], b = V sᵀ = [3, 7]
        let (a, b, d) = (5.25, 2.0, 10.25);
        let det = a * d - b * b;
        let x0 = (d * 3.0 - b * 7.0) / det;
        let x1 = (a * 7.0 - b * 3.0) / det;
        assert!((w[(0, 0)] - x0).abs() < 1e-12);
        assert!((w[(0, 1)] - x1).abs() < 1e-12);
    }

    #[test]
    fn ridge_rank_deficient_without_regularization() {
        let v = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let s = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let win = TrainingWindow::new(v, s).unwrap();
        assert_eq!(ridge_train(&win, 0.0), Err(EsnError::NumericalRank));
        assert!(ridge_train(&win, 0.1).is_ok());
    }

    #[test]
    fn periodic_trace_is_reproduced() {
        let period = [3.0, 7.0, 1.0, 4.0, 9.0, 2.0];
        let horizon = 4;
        let mut esn = MobilityEsn::new(8, WeightDistribution::PointMass(0.9), horizon, 1e-4, 5).unwrap();
        let trace: Vec<f64> = (0..400).map(|t| period[t % period.len()]).collect();
        let states = esn.collect_states(&trace);
        // skip the transient before the orbit settles
        let window = forecasting_window(&states.columns(200, 200).into_owned(), &trace[200..], horizon, 150).unwrap();
        esn.train(&window).unwrap();
        for &m in &trace[..=300] {
            esn.update_state(m);
        }
        let pred = esn.predict();
        for h in 0..horizon {
            let want = period[(301 + h) % period.len()];
            assert!((pred[h] - want).abs() < 1e-6, "h={h}: {} vs {want}", pred[h]);
        }
    }

    #[test]
    fn constant_input_state_is_bounded() {
        let w = 0.8;
        let mut esn = MobilityEsn::new(5, WeightDistribution::PointMass(w), 1, 0.5, 11).unwrap();
        let m = 3.0;
        let bound = esn.input_weights().norm() * m / (1.0 - w);
        for _ in 0..500 {
            assert!(esn.update_state(m).norm() <= bound + 1e-12);
        }
    }
}
