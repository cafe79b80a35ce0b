use alloc::vec;
use alloc::vec::Vec;

use super::CacheError;

/// Contents held by the cloud cache and by every RRH cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheState {
    catalog: usize,
    cloud_capacity: usize,
    rrh_capacity: usize,
    cloud: Vec<usize>,
    rrhs: Vec<Vec<usize>>,
}

fn checked_set(ids: &[usize], catalog: usize, capacity: usize) -> Result<Vec<usize>, CacheError> {
    if ids.len() > capacity {
        return Err(CacheError::Overfull { len: ids.len(), capacity });
    }
    let mut set = ids.to_vec();
    set.sort_unstable();
    for w in set.windows(2) {
        if w[0] == w[1] {
            return Err(CacheError::Duplicate(w[0]));
        }
    }
    if let Some(&id) = set.iter().find(|&&id| id >= catalog) {
        return Err(CacheError::UnknownContent { id, catalog });
    }
    Ok(set)
}

impl CacheState {
    /// Empty caches for `rrh_count` RRHs over a catalog of `catalog` contents.
    pub fn new(catalog: usize, rrh_count: usize, cloud_capacity: usize, rrh_capacity: usize) -> Self {
        Self {
            catalog,
            cloud_capacity,
            rrh_capacity,
            cloud: Vec::new(),
            rrhs: vec![Vec::new(); rrh_count],
        }
    }

    pub fn catalog(&self) -> usize {
        self.catalog
    }

    pub fn rrh_count(&self) -> usize {
        self.rrhs.len()
    }

    pub fn cloud_capacity(&self) -> usize {
        self.cloud_capacity
    }

    pub fn rrh_capacity(&self) -> usize {
        self.rrh_capacity
    }

    /// Sorted cloud contents.
    pub fn cloud(&self) -> &[usize] {
        &self.cloud
    }

    /// Sorted contents of RRH `r`.
    pub fn rrh(&self, r: usize) -> &[usize] {
        &self.rrhs[r]
    }

    pub fn set_cloud(&mut self, ids: &[usize]) -> Result<(), CacheError> {
        self.cloud = checked_set(ids, self.catalog, self.cloud_capacity)?;
        Ok(())
    }

    pub fn set_rrh(&mut self, r: usize, ids: &[usize]) -> Result<(), CacheError> {
        if r >= self.rrhs.len() {
            return Err(CacheError::UnknownRrh(r));
        }
        self.rrhs[r] = checked_set(ids, self.catalog, self.rrh_capacity)?;
        Ok(())
    }

    pub fn in_cloud(&self, id: usize) -> bool {
        self.cloud.binary_search(&id).is_ok()
    }

    pub fn in_rrh(&self, r: usize, id: usize) -> bool {
        self.rrhs[r].binary_search(&id).is_ok()
    }

    /// Whether any RRH other than `serving` holds `id`.
    pub fn in_remote_rrh(&self, serving: usize, id: usize) -> bool {
        self.rrhs
            .iter()
            .enumerate()
            .any(|(r, set)| r != serving && set.binary_search(&id).is_ok())
    }

    /// Re-check uniqueness, catalog range and capacities.
    pub fn validate(&self) -> Result<(), CacheError> {
        checked_set(&self.cloud, self.catalog, self.cloud_capacity)?;
        for set in &self.rrhs {
            checked_set(set, self.catalog, self.rrh_capacity)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_sets() {
        let mut s = CacheState::new(5, 2, 2, 1);
        assert_eq!(s.set_cloud(&[1, 1]), Err(CacheError::Duplicate(1)));
        assert_eq!(s.set_cloud(&[0, 1, 2]), Err(CacheError::Overfull { len: 3, capacity: 2 }));
        assert_eq!(s.set_rrh(0, &[5]), Err(CacheError::UnknownContent { id: 5, catalog: 5 }));
        assert_eq!(s.set_rrh(2, &[0]), Err(CacheError::UnknownRrh(2)));
        s.set_cloud(&[4, 2]).unwrap();
        assert_eq!(s.cloud(), &[2, 4]);
        s.set_rrh(1, &[3]).unwrap();
        assert!(s.in_remote_rrh(0, 3));
        assert!(!s.in_remote_rrh(1, 3));
        s.validate().unwrap();
    }
}
