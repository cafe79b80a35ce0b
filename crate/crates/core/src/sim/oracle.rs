use alloc::vec;
use alloc::vec::Vec;

use super::SimError;
use crate::cache::{select_cloud_cache, select_rrh_cache, update_distribution};

/// Effective capacity a user would get over each delivery path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathValues {
    pub o: f64,
    pub a: f64,
    pub g: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub cloud: Vec<usize>,
    pub rrhs: Vec<Vec<usize>>,
}

/// `Σ_u Σ_n p_un E_u(path(u, n))` with the path resolved as O, A, G, S in
/// that order of preference.
pub fn expected_objective(probs: &[Vec<f64>], serving: &[usize], values: &[PathValues], placement: &Placement) -> f64 {
    let catalog = probs.first().map_or(0, Vec::len);
    let mut holders = vec![0usize; catalog];
    for set in &placement.rrhs {
        for &n in set {
            holders[n] += 1;
        }
    }
    let mut in_cloud = vec![false; catalog];
    for &n in &placement.cloud {
        in_cloud[n] = true;
    }
    let mut total = 0.0;
    for ((p, &r), v) in probs.iter().zip(serving).zip(values) {
        let local = &placement.rrhs[r];
        for (n, &pn) in p.iter().enumerate() {
            if pn == 0.0 {
                continue;
            }
            let here = local.binary_search(&n).is_ok();
            let value = if here {
                v.o
            } else if in_cloud[n] {
                v.a
            } else if holders[n] > 0 {
                v.g
            } else {
                v.s
            };
            total += pn * value;
        }
    }
    total
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of joint placements searched; the cloud factor is dropped when
/// the cloud cache is held fixed.
pub fn combination_count(catalog: usize, cloud_capacity: usize, rrh_capacity: usize, rrhs: usize, cloud_free: bool) -> f64 {
    let per_rrh = binomial(catalog, rrh_capacity);
    let cloud = if cloud_free { binomial(catalog, cloud_capacity) } else { 1.0 };
    cloud * libm::pow(per_rrh, rrhs as f64)
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Exhaustive maximizer of [`expected_objective`]. With `fixed_cloud` only
/// the RRH caches are searched. The first maximum in lexicographic order
/// wins.
#[allow(clippy::too_many_arguments)]
pub fn exhaustive_placement(
    probs: &[Vec<f64>],
    serving: &[usize],
    values: &[PathValues],
    rrh_count: usize,
    cloud_capacity: usize,
    rrh_capacity: usize,
    fixed_cloud: Option<&[usize]>,
    limit: f64,
) -> Result<Placement, SimError> {
    let catalog = probs.first().map_or(0, Vec::len);
    let count = combination_count(catalog, cloud_capacity, rrh_capacity, rrh_count, fixed_cloud.is_none());
    if count > limit {
        return Err(SimError::OracleTooLarge { combinations: count, limit });
    }
    let rrh_options = subsets(catalog, rrh_capacity);
    let cloud_options = match fixed_cloud {
        Some(c) => vec![c.to_vec()],
        None => subsets(catalog, cloud_capacity),
    };
    let mut best: Option<(f64, Placement)> = None;
    let mut digits = vec![0usize; rrh_count];
    for cloud in &cloud_options {
        digits.iter_mut().for_each(|d| *d = 0);
        'placements: loop {
            let candidate = Placement {
                cloud: cloud.clone(),
                rrhs: digits.iter().map(|&d| rrh_options[d].clone()).collect(),
            };
            let value = expected_objective(probs, serving, values, &candidate);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, candidate));
            }
            // mixed-radix increment, last RRH fastest
            let mut i = rrh_count;
            while i > 0 {
                i -= 1;
                digits[i] += 1;
                if digits[i] < rrh_options.len() {
                    continue 'placements;
                }
                digits[i] = 0;
            }
            break;
        }
    }
    Ok(best.map(|(_, p)| p).unwrap_or(Placement { cloud: Vec::new(), rrhs: vec![Vec::new(); rrh_count] }))
}

/// The greedy rule: each RRH keeps the top contents of `Σ p E_O / N_r` over
/// its users, then the cloud keeps the top of `Σ p' E_A` with `p'` zeroed
/// on each user's RRH contents. With `fixed_cloud` the cloud is left alone.
pub fn greedy_placement(
    probs: &[Vec<f64>],
    serving: &[usize],
    values: &[PathValues],
    rrh_count: usize,
    cloud_capacity: usize,
    rrh_capacity: usize,
    fixed_cloud: Option<&[usize]>,
) -> Result<Placement, SimError> {
    let catalog = probs.first().map_or(0, Vec::len);
    let mut rrhs = Vec::with_capacity(rrh_count);
    for r in 0..rrh_count {
        let users: Vec<(&[f64], f64)> = probs
            .iter()
            .zip(serving)
            .zip(values)
            .filter(|((_, &s), _)| s == r)
            .map(|((p, _), v)| (p.as_slice(), v.o))
            .collect();
        rrhs.push(select_rrh_cache(&users, catalog, rrh_capacity)?);
    }
    let cloud = match fixed_cloud {
        Some(c) => c.to_vec(),
        None => {
            let mut pop = vec![0.0; catalog];
            for ((p, &s), v) in probs.iter().zip(serving).zip(values) {
                for (acc, x) in pop.iter_mut().zip(update_distribution(p, &rrhs[s])) {
                    *acc += x * v.a;
                }
            }
            select_cloud_cache(&pop, cloud_capacity)?
        }
    };
    Ok(Placement { cloud, rrhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerate_lexicographically() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(4, 2)[0], vec![0, 1]);
        assert_eq!(subsets(4, 2)[5], vec![2, 3]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combination_count(6, 2, 1, 3, true), 15.0 * 216.0);
    }

    #[test]
    fn full_rrh_capacity_caches_everything() {
        let probs = vec![vec![0.2, 0.3, 0.5]];
        let values = [PathValues { o: 4.0, a: 3.0, g: 2.0, s: 1.0 }];
        let p = exhaustive_placement(&probs, &[0], &values, 1, 1, 3, None, 1e6).unwrap();
        assert_eq!(p.rrhs[0], vec![0, 1, 2]);
        assert!((expected_objective(&probs, &[0], &values, &p) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_user_gets_modal_content() {
        let probs = vec![vec![0.2, 0.5, 0.3]];
        let values = [PathValues { o: 4.0, a: 3.0, g: 2.0, s: 1.0 }];
        let p = exhaustive_placement(&probs, &[0], &values, 1, 0, 1, None, 1e6).unwrap();
        assert_eq!(p.rrhs[0], vec![1]);
    }

    #[test]
    fn guard_refuses_large_instances() {
        let probs = vec![vec![0.1; 10]];
        let values = [PathValues { o: 1.0, a: 1.0, g: 1.0, s: 1.0 }];
        assert!(matches!(
            exhaustive_placement(&probs, &[0], &values, 10, 3, 3, None, 1e6),
            Err(SimError::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn exhaustive_dominates_greedy() {
        // a near tie at RRH 0 and a cloud slot shared with the user of RRH 1
        let probs = vec![vec![0.51, 0.49, 0.0], vec![0.0, 0.0, 1.0], vec![0.51, 0.0, 0.49]];
        let serving = [0, 1, 1];
        let values = [PathValues { o: 10.0, a: 9.0, g: 5.0, s: 1.0 }; 3];
        let g = greedy_placement(&probs, &serving, &values, 2, 1, 1, None).unwrap();
        let e = exhaustive_placement(&probs, &serving, &values, 2, 1, 1, None, 1e6).unwrap();
        let (vg, ve) = (
            expected_objective(&probs, &serving, &values, &g),
            expected_objective(&probs, &serving, &values, &e),
        );
        assert!(ve >= vg - 1e-12);
    }
}
