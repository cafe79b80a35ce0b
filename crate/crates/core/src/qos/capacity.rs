use rand_chacha::ChaCha8Rng;

/// `-(1/(θτ)) log₂ mean(2^(-θ C))` over cumulative-service samples `C`.
///
/// The mean is taken with a log-sum-exp shift so large `θ C` does not
/// underflow. For `θ <= 0` the limit `mean(C)/τ` is returned.
pub fn effective_capacity(theta: f64, samples: &[f64], tau: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let n = samples.len() as f64;
    if !(theta > 0.0) {
        return samples.iter().sum::<f64>() / n / tau;
    }
    if theta == f64::INFINITY {
        return 0.0;
    }
    let shift = samples.iter().map(|c| -theta * c).fold(f64::NEG_INFINITY, f64::max);
    let acc: f64 = samples.iter().map(|c| libm::exp2(-theta * c - shift)).sum();
    let log_mean = shift + libm::log2(acc) - libm::log2(n);
    (-log_mean / (theta * tau)).max(0.0)
}

/// Effective capacity from `n_mc` seeded draws of `sampler`.
pub fn effective_capacity_mc(
    theta: f64,
    tau: f64,
    n_mc: usize,
    rng: &mut ChaCha8Rng,
    mut sampler: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> f64 {
    let samples: alloc::vec::Vec<f64> = (0..n_mc).map(|_| sampler(rng)).collect();
    effective_capacity(theta, &samples, tau)
}

pub fn sum_effective_capacity(per_user: &[f64]) -> f64 {
    per_user.iter().sum()
}

pub fn long_term_average(per_slot: &[f64]) -> f64 {
    if per_slot.is_empty() {
        0.0
    } else {
        per_slot.iter().sum::<f64>() / per_slot.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_service() {
        for theta in [1e-6, 0.05, 1.0, 40.0] {
            let e = effective_capacity(theta, &[12.0; 5], 3.0);
            assert!((e - 4.0).abs() < 1e-9, "{theta}: {e}");
        }
    }

    #[test]
    fn two_point_closed_form() {
        let (theta, c, tau) = (0.3, 5.0, 2.0);
        let e = effective_capacity(theta, &[0.0, c], tau);
        let want = -libm::log2(0.5 * (1.0 + libm::exp2(-theta * c))) / (theta * tau);
        assert!((e - want).abs() < 1e-12);
    }

    #[test]
    fn huge_exponent_does_not_underflow() {
        let e = effective_capacity(1.0, &[5000.0, 6000.0], 1.0);
        assert!((e - (5000.0 - libm::log2(0.5 * (1.0 + libm::exp2(-1000.0))))).abs() < 1e-9);
    }

    #[test]
    fn sums_and_averages() {
        assert_eq!(sum_effective_capacity(&[0.0, 0.0]), 0.0);
        assert_eq!(sum_effective_capacity(&[3.0, 5.0]), 8.0);
        assert_eq!(long_term_average(&[6.0, 9.0, 12.0]), 9.0);
        assert_eq!(effective_capacity(0.0, &[2.0, 4.0], 2.0), 1.5);
    }
}
