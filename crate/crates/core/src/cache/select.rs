use alloc::vec;
use alloc::vec::Vec;

use super::{config_err, CacheError};

/// Indices of the `k` largest scores, ascending; ties go to the lower index.
pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Per-content RRH score `Σ_i p_in E_i / N_r` over the associated users.
pub fn rrh_scores(users: &[(&[f64], f64)], catalog: usize) -> Result<Vec<f64>, CacheError> {
    let mut scores = vec![0.0; catalog];
    if users.is_empty() {
        return Ok(scores);
    }
    for (p, e) in users {
        if p.len() != catalog {
            return Err(CacheError::Length { expected: catalog, found: p.len() });
        }
        for (s, v) in scores.iter_mut().zip(p.iter()) {
            *s += v * e;
        }
    }
    let n = users.len() as f64;
    for s in &mut scores {
        *s /= n;
    }
    Ok(scores)
}

/// The `capacity` contents an RRH should hold for the given associated users
/// (forecast, weight) pairs. No users means an empty cache.
pub fn select_rrh_cache(users: &[(&[f64], f64)], catalog: usize, capacity: usize) -> Result<Vec<usize>, CacheError> {
    if capacity > catalog {
        return Err(config_err("RRH cache capacity exceeds the catalog"));
    }
    if users.is_empty() {
        return Ok(Vec::new());
    }
    Ok(top_k(&rrh_scores(users, catalog)?, capacity))
}

/// Zero the entries of contents already held by the serving RRH.
pub fn update_distribution(p: &[f64], cached: &[usize]) -> Vec<f64> {
    let mut out = p.to_vec();
    for &n in cached {
        if let Some(v) = out.get_mut(n) {
            *v = 0.0;
        }
    }
    out
}

pub fn select_cloud_cache(popularity: &[f64], capacity: usize) -> Result<Vec<usize>, CacheError> {
    if capacity > popularity.len() {
        return Err(config_err("cloud cache capacity exceeds the catalog"));
    }
    Ok(top_k(popularity, capacity))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_user_argmax() {
        let p = [0.5, 0.3, 0.2];
        assert_eq!(select_rrh_cache(&[(&p, 1.0)], 3, 1), Ok(vec![0]));
        assert_eq!(select_rrh_cache(&[], 3, 1), Ok(vec![]));
        assert!(select_rrh_cache(&[(&p, 1.0)], 3, 4).is_err());
    }

    #[test]
    fn higher_weight_user_wins() {
        let a = [1.0, 0.0];
        let b = [0.0, 1.0];
        assert_eq!(select_rrh_cache(&[(&a, 2.0), (&b, 5.0)], 2, 1), Ok(vec![1]));
    }

    #[test]
    fn ties_prefer_lower_index() {
        let p = [0.1, 0.3, 0.0, 0.0, 0.3, 0.3];
        assert_eq!(top_k(&p, 1), vec![1]);
        assert_eq!(top_k(&p, 2), vec![1, 4]);
        assert_eq!(select_cloud_cache(&[0.25; 4], 2), Ok(vec![0, 1]));
    }

    #[test]
    fn update_zeroes_cached_entries() {
        let p = [0.5, 0.3, 0.2];
        assert_eq!(update_distribution(&p, &[]), p.to_vec());
        assert_eq!(update_distribution(&p, &[0, 1, 2]), vec![0.0; 3]);
        assert_eq!(update_distribution(&p, &[0]), vec![0.0, 0.3, 0.2]);
    }

    #[test]
    fn cloud_top_two() {
        assert_eq!(select_cloud_cache(&[0.1, 0.4, 0.3, 0.2], 2), Ok(vec![1, 2]));
        assert!(select_cloud_cache(&[0.1], 2).is_err());
    }
}
