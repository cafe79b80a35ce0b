use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use rand::Rng;

use super::sparse::{spectral_radius, SparseMatrix};
use super::{config_err, EsnError};
use crate::rng::uniform;

/// Number of context features: request hour, weekday, gender, occupation,
/// age, device type and one reserved slot.
pub const CONTEXT_WIDTH: usize = 7;

/// A user's context at one slot, every feature normalized to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextVector(Vec<f64>);

impl ContextVector {
    pub fn new(features: Vec<f64>) -> Result<Self, EsnError> {
        if let Some(bad) = features.iter().find(|v| !v.is_finite()) {
            return Err(EsnError::Config(alloc::format!("non-finite context feature {bad}")));
        }
        Ok(Self(features))
    }

    pub fn zeros(width: usize) -> Self {
        Self(vec![0.0; width])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A probability vector over the content catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentDistribution(Vec<f64>);

const SIMPLEX_TOL: f64 = 1e-9;

impl ContentDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, EsnError> {
        if probs.is_empty() {
            return Err(EsnError::InvalidDistribution("empty".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(EsnError::InvalidDistribution("negative or non-finite entry".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(EsnError::InvalidDistribution(alloc::format!("sums to {sum}")));
        }
        Ok(Self(probs))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn one_hot(n: usize, index: usize) -> Self {
        let mut p = vec![0.0; n];
        p[index] = 1.0;
        Self(p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Index of the most likely content, lowest index on ties.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// L1 distance to another distribution of the same length.
    pub fn l1_distance(&self, other: &ContentDistribution) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// Clamp negatives to zero and renormalize; an all-zero vector maps to the
/// uniform distribution. Preserves the ordering of the positive entries.
pub fn project_to_simplex(raw: &[f64]) -> ContentDistribution {
    let clamped: Vec<f64> = raw
        .iter()
        .map(|&v| if v.is_finite() && v > 0.0 { v } else { 0.0 })
        .collect();
    let sum: f64 = clamped.iter().sum();
    if sum <= 0.0 || !sum.is_finite() {
        return ContentDistribution::uniform(raw.len());
    }
    ContentDistribution(clamped.into_iter().map(|v| v / sum).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContentEsnConfig {
    pub reservoir_units: usize,
    pub context_width: usize,
    pub contents: usize,
    pub learning_rate: f64,
    pub spectral_radius: f64,
    /// Fraction of nonzero recurrent weights.
    pub density: f64,
    /// Input weights are drawn from `uniform(-input_scaling, input_scaling)`.
    pub input_scaling: f64,
    /// Output weights start in `uniform(-output_init, output_init)`.
    pub output_init: f64,
}

impl Default for ContentEsnConfig {
    fn default() -> Self {
        Self {
            reservoir_units: 1000,
            context_width: CONTEXT_WIDTH,
            contents: 50,
            learning_rate: 0.01,
            spectral_radius: 0.9,
            density: 0.1,
            input_scaling: 0.1,
            output_init: 0.01,
        }
    }
}

/// Context-to-demand predictor: a sparse tanh reservoir with a linear readout
/// over `[state; context]`, trained online by gradient steps.
#[derive(Debug, Clone)]
pub struct ContentEsn {
    input_weights: DMatrix<f64>,
    reservoir: SparseMatrix,
    output_weights: DMatrix<f64>,
    state: Vec<f64>,
    learning_rate: f64,
    spectral_radius: f64,
    scratch: Vec<f64>,
}

impl ContentEsn {
    pub fn random<R: Rng + ?Sized>(cfg: &ContentEsnConfig, rng: &mut R) -> Result<Self, EsnError> {
        let n_w = cfg.reservoir_units;
        let k = cfg.context_width;
        if n_w == 0 || k == 0 || cfg.contents == 0 {
            return Err(config_err("reservoir, context and catalog sizes must be positive"));
        }
        if !(cfg.spectral_radius > 0.0 && cfg.spectral_radius < 1.0) {
            return Err(config_err("spectral radius must lie in (0, 1)"));
        }
        if !(cfg.density > 0.0 && cfg.density <= 1.0) {
            return Err(config_err("reservoir density must lie in (0, 1]"));
        }
        let mut w = DMatrix::zeros(n_w, n_w);
        for r in 0..n_w {
            for c in 0..n_w {
                if rng.random::<f64>() < cfg.density {
                    w[(r, c)] = uniform(rng, -1.0, 1.0);
                }
            }
        }
        let mut reservoir = SparseMatrix::from_dense(&w);
        let rho = spectral_radius(&reservoir);
        if rho > 0.0 {
            reservoir.scale(cfg.spectral_radius / rho);
        }
        let input_weights =
            DMatrix::from_fn(n_w, k, |_, _| uniform(rng, -cfg.input_scaling, cfg.input_scaling));
        let output_weights =
            DMatrix::from_fn(cfg.contents, n_w + k, |_, _| uniform(rng, -cfg.output_init, cfg.output_init));
        let spectral_radius = if rho > 0.0 { cfg.spectral_radius } else { 0.0 };
        Ok(Self {
            input_weights,
            reservoir,
            output_weights,
            state: vec![0.0; n_w],
            learning_rate: cfg.learning_rate,
            spectral_radius,
            scratch: vec![0.0; n_w],
        })
    }

    /// Build from explicit matrices. The reservoir is stored sparsely and must
    /// have spectral radius below one.
    pub fn from_parts(
        input_weights: DMatrix<f64>,
        reservoir: DMatrix<f64>,
        output_weights: DMatrix<f64>,
        learning_rate: f64,
    ) -> Result<Self, EsnError> {
        let n_w = input_weights.nrows();
        let k = input_weights.ncols();
        if reservoir.nrows() != n_w || reservoir.ncols() != n_w {
            return Err(EsnError::Dimension {
                what: "reservoir",
                expected: n_w,
                found: reservoir.nrows(),
            });
        }
        if output_weights.ncols() != n_w + k {
            return Err(EsnError::Dimension {
                what: "output weight columns",
                expected: n_w + k,
                found: output_weights.ncols(),
            });
        }
        let reservoir = SparseMatrix::from_dense(&reservoir);
        let rho = spectral_radius(&reservoir);
        if rho >= 1.0 {
            return Err(config_err("reservoir spectral radius must be below one"));
        }
        Ok(Self {
            input_weights,
            reservoir,
            output_weights,
            state: vec![0.0; n_w],
            learning_rate,
            spectral_radius: rho,
            scratch: vec![0.0; n_w],
        })
    }

    pub fn reservoir_units(&self) -> usize {
        self.state.len()
    }

    pub fn context_width(&self) -> usize {
        self.input_weights.ncols()
    }

    pub fn contents(&self) -> usize {
        self.output_weights.nrows()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn state(&self) -> &[f64] {
        &self.state
    }

    pub fn set_state(&mut self, state: &[f64]) -> Result<(), EsnError> {
        self.check_len("state", self.state.len(), state.len())?;
        self.state.copy_from_slice(state);
        Ok(())
    }

    pub fn output_weights(&self) -> &DMatrix<f64> {
        &self.output_weights
    }

    pub fn reservoir_dense(&self) -> DMatrix<f64> {
        self.reservoir.to_dense()
    }

    fn check_len(&self, what: &'static str, expected: usize, found: usize) -> Result<(), EsnError> {
        if expected != found {
            return Err(EsnError::Dimension { what, expected, found });
        }
        Ok(())
    }

    /// `state ← tanh(W·state + W_in·x)`
    pub fn update_state(&mut self, x: &ContextVector) -> Result<&[f64], EsnError> {
        self.check_len("context", self.context_width(), x.len())?;
        self.reservoir.mul_vec_into(&self.state, &mut self.scratch);
        let xs = x.as_slice();
        for (r, s) in self.scratch.iter_mut().enumerate() {
            let mut drive = 0.0;
            for (c, xc) in xs.iter().enumerate() {
                drive += self.input_weights[(r, c)] * xc;
            }
            *s = libm::tanh(*s + drive);
        }
        core::mem::swap(&mut self.state, &mut self.scratch);
        Ok(&self.state)
    }

    /// Unprojected readout `W_out·[state; x]`.
    pub fn raw_output(&self, x: &ContextVector) -> Result<Vec<f64>, EsnError> {
        self.check_len("context", self.context_width(), x.len())?;
        let n_w = self.state.len();
        let xs = x.as_slice();
        Ok((0..self.contents())
            .map(|n| {
                let row = self.output_weights.row(n);
                let mut acc = 0.0;
                for (j, s) in self.state.iter().enumerate() {
                    acc += row[j] * s;
                }
                for (c, xc) in xs.iter().enumerate() {
                    acc += row[n_w + c] * xc;
                }
                acc
            })
            .collect())
    }

    pub fn predict(&self, x: &ContextVector) -> Result<ContentDistribution, EsnError> {
        Ok(project_to_simplex(&self.raw_output(x)?))
    }

    /// One gradient step `W_out ← W_out + λ(e − y)[state; x]ᵀ` on the raw
    /// readout. Call after [`update_state`](Self::update_state) for the same
    /// context. Returns the L1 error of the projected prediction made before
    /// the step.
    pub fn train_step(&mut self, x: &ContextVector, observed: &ContentDistribution) -> Result<f64, EsnError> {
        self.check_len("observed distribution", self.contents(), observed.len())?;
        let raw = self.raw_output(x)?;
        let error = project_to_simplex(&raw).l1_distance(observed);
        let n_w = self.state.len();
        let xs = x.as_slice();
        for (n, (e, y)) in observed.as_slice().iter().zip(&raw).enumerate() {
            let g = self.learning_rate * (e - y);
            if g == 0.0 {
                continue;
            }
            for j in 0..n_w {
                self.output_weights[(n, j)] += g * self.state[j];
            }
            for (c, xc) in xs.iter().enumerate() {
                self.output_weights[(n, n_w + c)] += g * xc;
            }
        }
        Ok(error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use alloc::vec;

    fn ctx(v: &[f64]) -> ContextVector {
        ContextVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_state_zero_input_stays_zero() {
        let cfg = ContentEsnConfig {
            reservoir_units: 20,
            contents: 5,
            ..Default::default()
        };
        let mut esn = ContentEsn::random(&cfg, &mut stream(1, Purpose::ContentEsn, &[])).unwrap();
        let s = esn.update_state(&ContextVector::zeros(CONTEXT_WIDTH)).unwrap();
        assert!(s.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn two_unit_hand_recurrence() {
        let mut esn = ContentEsn::from_parts(
            DMatrix::from_row_slice(2, 1, &[1.0, 1.0]),
            DMatrix::zeros(2, 2),
            DMatrix::zeros(1, 3),
            0.1,
        )
        .unwrap();
        let s = esn.update_state(&ctx(&[0.5])).unwrap().to_vec();
        // tanh(0.5) = 0.46211715726000974
        for v in s {
            assert!((v - 0.462_117_157_260_009_7).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_input_state_decays_monotonically() {
        let cfg = ContentEsnConfig {
            reservoir_units: 40,
            contents: 3,
            ..Default::default()
        };
        let mut esn = ContentEsn::random(&cfg, &mut stream(3, Purpose::ContentEsn, &[])).unwrap();
        assert!((esn.spectral_radius() - 0.9).abs() < 1e-9);
        let start: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 0.8 } else { -0.6 }).collect();
        esn.set_state(&start).unwrap();
        let zero = ContextVector::zeros(CONTEXT_WIDTH);
        let norm = |s: &[f64]| libm::sqrt(s.iter().map(|v| v * v).sum::<f64>());
        let mut norms = vec![norm(esn.state())];
        for _ in 0..1000 {
            let s = esn.update_state(&zero).unwrap();
            norms.push(norm(s));
        }
        // a radius below one gives eventual contraction, not a per-step one
        // in the Euclidean norm; the trend over 50-step windows is monotone
        for w in norms.chunks(50).collect::<Vec<_>>().windows(2) {
            let a = w[0].iter().copied().fold(0.0, f64::max);
            let b = w[1].iter().copied().fold(0.0, f64::max);
            assert!(b <= a, "{b} > {a}");
        }
        assert!(*norms.last().unwrap() < 1e-6);
    }

    #[test]
    fn zero_readout_predicts_uniform() {
        let esn = ContentEsn::from_parts(
            DMatrix::from_element(3, 2, 0.3),
            DMatrix::zeros(3, 3),
            DMatrix::zeros(4, 5),
            0.01,
        )
        .unwrap();
        let p = esn.predict(&ctx(&[0.2, 0.9])).unwrap();
        assert_eq!(p, ContentDistribution::uniform(4));
    }

    #[test]
    fn one_hot_readout_predicts_one_hot() {
        let mut out = DMatrix::zeros(3, 3);
        out[(1, 0)] = 1.0;
        let mut esn = ContentEsn::from_parts(
            DMatrix::from_row_slice(2, 1, &[0.0, 0.0]),
            DMatrix::zeros(2, 2),
            out,
            0.01,
        )
        .unwrap();
        esn.set_state(&[1.0, 0.3]).unwrap();
        let p = esn.predict(&ctx(&[0.0])).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn projection_clamps_and_renormalizes() {
        let p = project_to_simplex(&[0.2, -0.1, 0.3]);
        let want = [0.4, 0.0, 0.6];
        for (a, b) in p.as_slice().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(project_to_simplex(&[-1.0, 0.0]), ContentDistribution::uniform(2));
    }

    #[test]
    fn exact_prediction_leaves_weights_alone() {
        let mut out = DMatrix::zeros(2, 2);
        out[(0, 0)] = 0.25;
        out[(1, 0)] = 0.75;
        let mut esn =
            ContentEsn::from_parts(DMatrix::zeros(1, 1), DMatrix::zeros(1, 1), out.clone(), 0.5).unwrap();
        esn.set_state(&[1.0]).unwrap();
        let observed = ContentDistribution::new(vec![0.25, 0.75]).unwrap();
        let err = esn.train_step(&ctx(&[0.0]), &observed).unwrap();
        assert_eq!(err, 0.0);
        assert_eq!(esn.output_weights(), &out);
    }

    #[test]
    fn single_gradient_step() {
        let mut esn = ContentEsn::from_parts(
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            DMatrix::from_row_slice(1, 2, &[0.5, 0.0]),
            0.1,
        )
        .unwrap();
        esn.set_state(&[1.0]).unwrap();
        let observed = ContentDistribution::new(vec![1.0]).unwrap();
        esn.train_step(&ctx(&[0.0]), &observed).unwrap();
        // 0.5 + 0.1·(1 − 0.5)·1
        assert!((esn.output_weights()[(0, 0)] - 0.55).abs() < 1e-15);
        assert_eq!(esn.output_weights()[(0, 1)], 0.0);
    }

    #[test]
    fn dimension_errors() {
        let mut esn =
            ContentEsn::from_parts(DMatrix::zeros(2, 3), DMatrix::zeros(2, 2), DMatrix::zeros(4, 5), 0.1)
                .unwrap();
        assert!(matches!(esn.update_state(&ctx(&[0.0])), Err(EsnError::Dimension { .. })));
        assert!(ContentEsn::from_parts(DMatrix::zeros(2, 3), DMatrix::zeros(2, 2), DMatrix::zeros(4, 4), 0.1)
            .is_err());
        let unstable = DMatrix::from_row_slice(2, 2, &[0.0, 1.2, 1.2, 0.0]);
        assert!(ContentEsn::from_parts(DMatrix::zeros(2, 1), unstable, DMatrix::zeros(1, 3), 0.1).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(ContentDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(ContentDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ContentDistribution::new(vec![1.2, -0.2]).is_err());
        assert!(ContentDistribution::new(vec![]).is_err());
        assert_eq!(ContentDistribution::new(vec![0.2, 0.4, 0.4]).unwrap().mode(), 1);
    }
}
