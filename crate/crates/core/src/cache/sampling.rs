use alloc::vec;
use alloc::vec::Vec;
use rand::seq::index;
use rand::Rng;

use super::{config_err, CacheError};

/// Number of samples that keeps an empirical mean of `[0, 1]` values within
/// `epsilon` of the truth with probability at least `1 - delta`.
pub fn hoeffding_sample_size(epsilon: f64, delta: f64) -> Result<usize, CacheError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(config_err("epsilon must lie in (0, 1)"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(config_err("delta must lie in (0, 1]"));
    }
    let n = libm::ceil(-libm::log(delta) / (2.0 * epsilon * epsilon));
    Ok(if n > 0.0 { n as usize } else { 0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingPlan {
    pub epsilon: f64,
    pub delta: f64,
    pub sample_size: usize,
}

impl SamplingPlan {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self, CacheError> {
        Ok(Self {
            epsilon,
            delta,
            sample_size: hoeffding_sample_size(epsilon, delta)?,
        })
    }
}

/// One updated demand vector with its effective-capacity weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularitySample {
    pub slot: usize,
    pub values: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopularityEstimate {
    pub values: Vec<f64>,
    pub sampled: usize,
    /// Set when the stream had fewer items than the plan asked for.
    pub full_scan: bool,
}

/// Split `total` draws across strata in proportion to their sizes (largest
/// remainder, earlier stratum first on ties).
fn allocate(sizes: &[usize], total: usize) -> Vec<usize> {
    let population: usize = sizes.iter().sum();
    let mut alloc: Vec<usize> = sizes.iter().map(|&s| s * total / population).collect();
    let mut left = total - alloc.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = (sizes[a] * total) % population;
        let rb = (sizes[b] * total) % population;
        rb.cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        if alloc[i] < sizes[i] {
            alloc[i] += 1;
            left -= 1;
        }
    }
    alloc
}

/// Weighted mean `Σ w·p / n` over a uniform without-replacement sample of
/// `plan.sample_size` items, stratified by slot.
pub fn estimate_popularity<R: Rng + ?Sized>(
    stream: &[PopularitySample],
    catalog: usize,
    plan: &SamplingPlan,
    rng: &mut R,
) -> Result<PopularityEstimate, CacheError> {
    for s in stream {
        if s.values.len() != catalog {
            return Err(CacheError::Length { expected: catalog, found: s.values.len() });
        }
    }
    let mut out = vec![0.0; catalog];
    if stream.is_empty() {
        return Ok(PopularityEstimate { values: out, sampled: 0, full_scan: true });
    }
    let accumulate = |out: &mut Vec<f64>, s: &PopularitySample| {
        for (o, v) in out.iter_mut().zip(&s.values) {
            *o += s.weight * v;
        }
    };
    let full_scan = plan.sample_size >= stream.len();
    let sampled = if full_scan {
        for s in stream {
            accumulate(&mut out, s);
        }
        stream.len()
    } else if plan.sample_size == 0 {
        return Ok(PopularityEstimate { values: out, sampled: 0, full_scan: false });
    } else {
        // group indices by slot, keeping stream order within a slot
        let mut slots: Vec<usize> = stream.iter().map(|s| s.slot).collect();
        slots.sort_unstable();
        slots.dedup();
        let mut strata: Vec<Vec<usize>> = vec![Vec::new(); slots.len()];
        for (i, s) in stream.iter().enumerate() {
            let k = slots.binary_search(&s.slot).unwrap_or(0);
            strata[k].push(i);
        }
        let sizes: Vec<usize> = strata.iter().map(Vec::len).collect();
        let draws = allocate(&sizes, plan.sample_size);
        for (members, &m) in strata.iter().zip(&draws) {
            if m == 0 {
                continue;
            }
            for pick in index::sample(rng, members.len(), m).into_iter() {
                accumulate(&mut out, &stream[members[pick]]);
            }
        }
        plan.sample_size
    };
    let n = sampled as f64;
    for o in &mut out {
        *o /= n;
    }
    Ok(PopularityEstimate { values: out, sampled, full_scan })
}

/// Tally of repeated sample-mean estimates against a known population mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub trials: usize,
    /// Estimates off by more than `epsilon`.
    pub failures: usize,
    pub mean_abs_error: f64,
}

impl Coverage {
    pub fn failure_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }
}

/// Population of `[0, 1]` values skewed towards zero, like per-content
/// demand shares.
pub fn coverage_population(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = crate::rng::stream(seed, crate::rng::Purpose::Sampling, &[u64::MAX]);
    (0..len).map(|_| libm::pow(rng.random::<f64>(), 3.0)).collect()
}

/// Repeat a without-replacement estimate of the mean of `population`
/// `trials` times with `plan.sample_size` draws each.
pub fn sampling_coverage(population: &[f64], plan: &SamplingPlan, trials: usize, seed: u64) -> Result<Coverage, CacheError> {
    if population.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(config_err("population values must lie in [0, 1]"));
    }
    if population.is_empty() || plan.sample_size == 0 {
        return Ok(Coverage { trials, failures: 0, mean_abs_error: 0.0 });
    }
    let truth = population.iter().sum::<f64>() / population.len() as f64;
    let m = plan.sample_size.min(population.len());
    let mut failures = 0;
    let mut err_sum = 0.0;
    for t in 0..trials {
        let mut rng = crate::rng::stream(seed, crate::rng::Purpose::Sampling, &[t as u64]);
        let est = index::sample(&mut rng, population.len(), m).into_iter().map(|i| population[i]).sum::<f64>() / m as f64;
        let err = (est - truth).abs();
        err_sum += err;
        if err > plan.epsilon {
            failures += 1;
        }
    }
    Ok(Coverage { trials, failures, mean_abs_error: err_sum / trials.max(1) as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn sample_sizes() {
        assert_eq!(hoeffding_sample_size(0.05, 0.05), Ok(600));
        assert_eq!(hoeffding_sample_size(0.03, 0.05), Ok(1665));
        assert_eq!(hoeffding_sample_size(0.2, 1.0), Ok(0));
        assert!(hoeffding_sample_size(0.0, 0.5).is_err());
        assert!(hoeffding_sample_size(0.1, 0.0).is_err());
        assert!(hoeffding_sample_size(1.0, 0.5).is_err());
    }

    #[test]
    fn allocation_is_exact_and_bounded() {
        assert_eq!(allocate(&[3, 3, 3], 4), vec![2, 1, 1]);
        assert_eq!(allocate(&[1, 10], 5), vec![0, 5]);
        assert_eq!(allocate(&[2, 2], 4), vec![2, 2]);
    }

    #[test]
    fn constant_population() {
        let p = vec![0.5, 0.25, 0.25];
        let items: Vec<_> = (0..50)
            .map(|i| PopularitySample { slot: i % 5, values: p.clone(), weight: 1.0 + (i % 3) as f64 })
            .collect();
        let plan = SamplingPlan { epsilon: 0.1, delta: 0.1, sample_size: 10 };
        let mut rng = stream(1, Purpose::Sampling, &[]);
        let est = estimate_popularity(&items, 3, &plan, &mut rng).unwrap();
        assert_eq!(est.sampled, 10);
        // the weighted mean of a constant vector is the vector times the mean sampled weight
        let scale = est.values[0] / 0.5;
        for (e, v) in est.values.iter().zip(&p) {
            assert!((e - v * scale).abs() < 1e-12);
        }
    }

    #[test]
    fn short_stream_is_scanned() {
        let items: Vec<_> = (0..4)
            .map(|i| PopularitySample { slot: 0, values: vec![i as f64, 1.0], weight: 2.0 })
            .collect();
        let plan = SamplingPlan::new(0.05, 0.05).unwrap();
        let mut rng = stream(1, Purpose::Sampling, &[]);
        let est = estimate_popularity(&items, 2, &plan, &mut rng).unwrap();
        assert!(est.full_scan);
        assert_eq!(est.values, vec![3.0, 2.0]);
    }
}
