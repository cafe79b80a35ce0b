use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use super::{CacheError, SamplingPlan};

fn check_lengths(p: &[f64], q: &[f64]) -> Result<(), CacheError> {
    if p.len() != q.len() {
        return Err(CacheError::Length { expected: p.len(), found: q.len() });
    }
    Ok(())
}

/// Total-variation distance `½ Σ |p_n - q_n|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64, CacheError> {
    check_lengths(p, q)?;
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Total-variation estimate from `draws` coordinates sampled uniformly with
/// replacement and scaled to the full support.
pub fn sampled_distance<R: Rng + ?Sized>(p: &[f64], q: &[f64], draws: usize, rng: &mut R) -> Result<f64, CacheError> {
    check_lengths(p, q)?;
    if p.is_empty() || draws == 0 {
        return Ok(0.0);
    }
    let n = p.len();
    let mut acc = 0.0;
    for _ in 0..draws {
        let i = rng.random_range(0..n);
        acc += (p[i] - q[i]).abs();
    }
    Ok(0.5 * acc * n as f64 / draws as f64)
}

/// Exact distance, or a `plan.sample_size`-draw estimate when `sampled` is set.
pub fn distribution_distance<R: Rng + ?Sized>(
    p: &[f64],
    q: &[f64],
    sampled: bool,
    plan: &SamplingPlan,
    rng: &mut R,
) -> Result<f64, CacheError> {
    if sampled {
        sampled_distance(p, q, plan.sample_size, rng)
    } else {
        tv_distance(p, q)
    }
}

/// A user's demand forecast and the RRH it is associated with.
#[derive(Debug, Clone, PartialEq)]
pub struct UserDemand<'a> {
    pub rrh: usize,
    pub probs: &'a [f64],
}

/// Groups of RRHs whose users share a demand type. An RRH may belong to
/// several groups.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    pub clusters: Vec<Vec<usize>>,
    pub threshold: f64,
}

impl ClusterSet {
    /// Every RRH in its own cluster.
    pub fn singletons(rrh_count: usize, threshold: f64) -> Self {
        Self {
            clusters: (0..rrh_count).map(|r| vec![r]).collect(),
            threshold,
        }
    }

    /// Sorted union of every cluster containing `r`, always including `r`.
    pub fn neighbours(&self, r: usize) -> Vec<usize> {
        let mut out = BTreeSet::new();
        out.insert(r);
        for c in &self.clusters {
            if c.binary_search(&r).is_ok() {
                out.extend(c.iter().copied());
            }
        }
        out.into_iter().collect()
    }

    /// `mask[j]` is set when RRH `j` shares a cluster with `r`.
    pub fn neighbour_mask(&self, r: usize, rrh_count: usize) -> Vec<bool> {
        let mut mask = vec![false; rrh_count];
        for j in self.neighbours(r) {
            mask[j] = true;
        }
        mask
    }

    pub fn covers(&self, rrh_count: usize) -> bool {
        let mut seen = vec![false; rrh_count];
        for c in &self.clusters {
            for &r in c {
                if r < rrh_count {
                    seen[r] = true;
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Cluster RRHs around user demand types.
///
/// Each user anchors the set of RRHs hosting some user whose forecast lies
/// within total-variation distance `chi` of its own. Distinct anchor sets
/// that are not strict subsets of another become clusters; RRHs without
/// users are kept as singletons. Output is sorted.
pub fn cluster_rrhs(users: &[UserDemand<'_>], rrh_count: usize, chi: f64) -> Result<ClusterSet, CacheError> {
    for u in users {
        if u.rrh >= rrh_count {
            return Err(CacheError::UnknownRrh(u.rrh));
        }
    }
    let mut anchors: BTreeSet<Vec<usize>> = BTreeSet::new();
    for a in users {
        let mut set = BTreeSet::new();
        for b in users {
            if tv_distance(a.probs, b.probs)? < chi {
                set.insert(b.rrh);
            }
        }
        set.insert(a.rrh);
        anchors.insert(set.into_iter().collect());
    }
    let candidates: Vec<Vec<usize>> = anchors.into_iter().collect();
    let is_strict_subset = |small: &[usize], big: &[usize]| {
        small.len() < big.len() && small.iter().all(|x| big.binary_search(x).is_ok())
    };
    let mut clusters: Vec<Vec<usize>> = candidates
        .iter()
        .filter(|c| !candidates.iter().any(|d| is_strict_subset(c, d)))
        .cloned()
        .collect();
    let mut hosted = vec![false; rrh_count];
    for u in users {
        hosted[u.rrh] = true;
    }
    for (r, h) in hosted.iter().enumerate() {
        if !h {
            clusters.push(vec![r]);
        }
    }
    clusters.sort();
    Ok(ClusterSet { clusters, threshold: chi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn distances() {
        assert_eq!(tv_distance(&[0.2, 0.8], &[0.2, 0.8]), Ok(0.0));
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]), Ok(1.0));
        assert_eq!(tv_distance(&[0.5, 0.5, 0.0], &[0.25, 0.25, 0.5]), Ok(0.5));
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn sampled_distance_converges() {
        let p = [0.5, 0.5, 0.0, 0.0];
        let q = [0.25, 0.25, 0.25, 0.25];
        let mut rng = stream(3, Purpose::Sampling, &[]);
        let est = sampled_distance(&p, &q, 20_000, &mut rng).unwrap();
        assert!((est - 0.5).abs() < 0.02, "{est}");
    }

    #[test]
    fn worked_example_two_overlapping_clusters() {
        let t1 = [1.0, 0.0, 0.0];
        let t2 = [0.0, 0.0, 1.0];
        let users = [
            UserDemand { rrh: 0, probs: &t1 },
            UserDemand { rrh: 0, probs: &t2 },
            UserDemand { rrh: 1, probs: &t1 },
            UserDemand { rrh: 2, probs: &t2 },
        ];
        let cs = cluster_rrhs(&users, 3, 0.85).unwrap();
        assert_eq!(cs.clusters, vec![vec![0, 1], vec![0, 2]]);
        assert_eq!(cs.neighbours(0), vec![0, 1, 2]);
        assert_eq!(cs.neighbours(1), vec![0, 1]);
    }

    #[test]
    fn distant_types_and_empty_rrhs_are_singletons() {
        let t1 = [1.0, 0.0];
        let t2 = [0.0, 1.0];
        let users = [UserDemand { rrh: 0, probs: &t1 }, UserDemand { rrh: 2, probs: &t2 }];
        let cs = cluster_rrhs(&users, 4, 0.85).unwrap();
        assert_eq!(cs.clusters, vec![vec![0], vec![1], vec![2], vec![3]]);
        assert!(cs.covers(4));
    }

    #[test]
    fn close_types_merge() {
        let a = [0.5, 0.3, 0.2];
        let b = [0.4, 0.4, 0.2];
        let c = [0.45, 0.3, 0.25];
        let users = [
            UserDemand { rrh: 0, probs: &a },
            UserDemand { rrh: 1, probs: &b },
            UserDemand { rrh: 2, probs: &c },
        ];
        let cs = cluster_rrhs(&users, 3, 0.85).unwrap();
        assert_eq!(cs.clusters, vec![vec![0, 1, 2]]);
    }
}
