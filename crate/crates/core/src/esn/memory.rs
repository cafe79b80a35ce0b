//! Memory capacity of the cycle-reservoir mobility ESN.
//!
//! The analytic value sums, over delays `k >= 1`, the squared correlation
//! between the input `k` steps back and its best linear reconstruction from
//! the reservoir state. [`empirical_memory_capacity`] measures the same
//! quantity on a driven reservoir.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use super::mobility::{MobilityEsn, WeightDistribution};
use super::{config_err, EsnError};
use crate::rng::{stream, Purpose};

pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

const MAX_SERIES_TERMS: usize = 1_000_000;

/// Sum `Σ_j term(j)` where `|term(j)| <= rho^(2(W j + k))`, stopping once the
/// geometric tail bound drops below `tol`.
fn truncated_series(w: usize, k: usize, rho: f64, tol: f64, term: impl Fn(usize) -> f64) -> f64 {
    if rho == 0.0 {
        return term(0);
    }
    let ratio = libm::pow(rho, 2.0 * w as f64);
    let mut sum = 0.0;
    for j in 0..MAX_SERIES_TERMS {
        sum += term(j);
        let next = libm::pow(rho, 2.0 * (w * (j + 1) + k) as f64);
        if next / (1.0 - ratio) < tol {
            break;
        }
    }
    sum
}

/// Literal evaluation of the delay-sum expression for any supported law.
pub fn memory_capacity_series(spec: WeightDistribution, w: usize, series_tol: f64) -> Result<f64, EsnError> {
    if w == 0 {
        return Err(config_err("reservoir size must be at least 1"));
    }
    if !(series_tol > 0.0) {
        return Err(config_err("series tolerance must be positive"));
    }
    spec.validate()?;
    let rho = spec.max_abs();
    let mut total = 0.0;
    let mut first_denominator = 0.0;
    for k in 0..w {
        let denom = truncated_series(w, k, rho, series_tol, |j| spec.moment((2 * w * j + 2 * k) as u32));
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(EsnError::DegenerateDistribution { delay: k });
        }
        let num = truncated_series(w, k, rho, series_tol, |j| {
            let m = spec.moment((w * j + k) as u32);
            m * m
        });
        if k == 0 {
            first_denominator = denom;
        }
        total += num / denom;
    }
    Ok(total - 1.0 / first_denominator)
}

/// Memory capacity of a `W`-unit cycle reservoir whose weights follow `spec`.
///
/// Point-mass and symmetric-binary laws use the closed forms
/// `W - 1 + a^(2W)` and `⌊W/2⌋ + a^(2W)`; the uniform law is summed until
/// the tail bound falls below `series_tol`.
pub fn memory_capacity(spec: WeightDistribution, w: usize, series_tol: f64) -> Result<f64, EsnError> {
    if w == 0 {
        return Err(config_err("reservoir size must be at least 1"));
    }
    spec.validate()?;
    match spec {
        WeightDistribution::PointMass(a) if a != 0.0 => Ok((w - 1) as f64 + libm::pow(a, 2.0 * w as f64)),
        WeightDistribution::SymmetricBinary(a) if a != 0.0 => Ok((w / 2) as f64 + libm::pow(a, 2.0 * w as f64)),
        _ => memory_capacity_series(spec, w, series_tol),
    }
}

/// `(lower, upper)` bounds on the memory capacity for the law's family.
pub fn memory_capacity_bounds(spec: WeightDistribution, w: usize) -> Result<(f64, f64), EsnError> {
    if w == 0 {
        return Err(config_err("reservoir size must be at least 1"));
    }
    spec.validate()?;
    if spec.is_zero_mean() {
        Ok((0.0, (w / 2 + 1) as f64))
    } else if spec.is_strictly_positive() {
        Ok((0.0, w as f64))
    } else {
        Err(EsnError::UnsupportedFamily)
    }
}

const TERM_FLOOR: f64 = 1e-4;

/// Drive the reservoir with a zero-mean, unit-variance input and sum the
/// squared correlations between each delayed input and its least-squares
/// reconstruction from the state, for delays `k >= 1`.
///
/// The input at step `t` is uniform on `[-√3, √3]`, drawn from the sub-stream
/// of phase `t mod input_period`, so its law repeats with that period. All
/// delays below `W` are counted; beyond that the sum stops at the first
/// term under `1e-4`.
pub fn empirical_memory_capacity(
    esn: &MobilityEsn,
    input_period: usize,
    trace_len: usize,
    seed: u64,
) -> Result<f64, EsnError> {
    let w = esn.units();
    let max_delay = (4 * w).max(40);
    let washout = 10 * w + 100;
    if input_period == 0 {
        return Err(config_err("input period must be positive"));
    }
    if trace_len <= washout + max_delay + w + 1 {
        return Err(EsnError::Measurement("trace too short for washout and delays"));
    }

    let half_width = libm::sqrt(3.0);
    let mut phase_rngs: Vec<_> = (0..input_period)
        .map(|p| stream(seed, Purpose::Input, &[p as u64]))
        .collect();
    let inputs: Vec<f64> = (0..trace_len)
        .map(|t| crate::rng::uniform(&mut phase_rngs[t % input_period], -half_width, half_width))
        .collect();

    let states = esn.collect_states(&inputs);
    let start = washout.max(max_delay);
    let n = trace_len - start;
    let nf = n as f64;

    let mut mean = DVector::zeros(w);
    for t in start..trace_len {
        mean += states.column(t);
    }
    mean /= nf;
    let mut centered = DMatrix::zeros(w, n);
    for (c, t) in (start..trace_len).enumerate() {
        centered.set_column(c, &(states.column(t) - &mean));
    }
    let mut gram = &centered * centered.transpose();
    // a tiny ridge keeps rank-deficient states (e.g. a zero cycle) solvable
    let jitter = gram.trace().max(f64::MIN_POSITIVE) * 1e-12;
    for i in 0..w {
        gram[(i, i)] += jitter;
    }
    let chol = gram.cholesky().ok_or(EsnError::Measurement("state covariance is singular"))?;

    let mut total = 0.0;
    for k in 1..=max_delay {
        let window = &inputs[start - k..trace_len - k];
        let u_mean = window.iter().sum::<f64>() / nf;
        let u: DVector<f64> = DVector::from_iterator(n, window.iter().map(|v| v - u_mean));
        let u_var = u.dot(&u);
        if !(u_var > 0.0) {
            return Err(EsnError::Measurement("input has zero variance"));
        }
        let cross = &centered * &u;
        let coef = chol.solve(&cross);
        let r2 = (cross.dot(&coef) / u_var).clamp(0.0, 1.0);
        total += r2;
        if k >= w && r2 < TERM_FLOOR {
            break;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_closed_form() {
        let m = memory_capacity(WeightDistribution::PointMass(0.9), 10, DEFAULT_SERIES_TOL).unwrap();
        assert!((m - 9.121_576_654_590_57).abs() < 1e-9, "{m}");
        let s = memory_capacity_series(WeightDistribution::PointMass(0.9), 10, DEFAULT_SERIES_TOL).unwrap();
        assert!((m - s).abs() < 1e-10);
    }

    #[test]
    fn symmetric_binary_closed_form() {
        let m = memory_capacity(WeightDistribution::SymmetricBinary(0.9), 10, DEFAULT_SERIES_TOL).unwrap();
        assert!((m - 5.121_576_654_590_569).abs() < 1e-9, "{m}");
        // the delay-sum counts even delays 0..W-1 only, one fewer than the closed form
        let s = memory_capacity_series(WeightDistribution::SymmetricBinary(0.9), 10, DEFAULT_SERIES_TOL).unwrap();
        assert!((m - s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn capacity_approaches_size() {
        let m = memory_capacity(WeightDistribution::PointMass(0.9999), 12, DEFAULT_SERIES_TOL).unwrap();
        assert!((m - 12.0).abs() < 0.01);
    }

    #[test]
    fn uniform_series_matches_moments() {
        let spec = WeightDistribution::Uniform { lo: 0.2, hi: 0.6 };
        assert!((spec.moment(2) - (0.216 - 0.008) / (3.0 * 0.4)).abs() < 1e-15);
        let m = memory_capacity(spec, 6, DEFAULT_SERIES_TOL).unwrap();
        let (lo, hi) = memory_capacity_bounds(spec, 6).unwrap();
        assert!(m > lo && m < hi);
    }

    #[test]
    fn zero_weights_are_degenerate() {
        assert_eq!(
            memory_capacity(WeightDistribution::PointMass(0.0), 4, DEFAULT_SERIES_TOL),
            Err(EsnError::DegenerateDistribution { delay: 1 })
        );
        assert_eq!(memory_capacity(WeightDistribution::PointMass(0.0), 1, DEFAULT_SERIES_TOL), Ok(0.0));
    }

    #[test]
    fn bounds_by_family() {
        assert_eq!(memory_capacity_bounds(WeightDistribution::SymmetricBinary(0.3), 10), Ok((0.0, 6.0)));
        assert_eq!(memory_capacity_bounds(WeightDistribution::PointMass(0.5), 8), Ok((0.0, 8.0)));
        assert_eq!(
            memory_capacity_bounds(WeightDistribution::Uniform { lo: -0.2, hi: 0.5 }, 8),
            Err(EsnError::UnsupportedFamily)
        );
        assert_eq!(
            memory_capacity_bounds(WeightDistribution::PointMass(-0.5), 8),
            Err(EsnError::UnsupportedFamily)
        );
    }

    #[test]
    fn empirical_forgets_without_recurrence() {
        let esn = MobilityEsn::new(5, WeightDistribution::PointMass(0.0), 1, 0.0, 3).unwrap();
        let m = empirical_memory_capacity(&esn, 5, 5000, 1).unwrap();
        assert!(m < 0.05, "{m}");
    }
}
