//! Cache placement: Hoeffding-sized sampling of demand, RRH clustering by
//! demand similarity, and top-k selection for RRH and cloud caches.
//!
//! Content ids are 0-based here; files and reports print them 1-based.

mod cluster;
mod sampling;
mod select;
mod state;

use alloc::string::String;

pub use cluster::{cluster_rrhs, distribution_distance, sampled_distance, tv_distance, ClusterSet, UserDemand};
pub use sampling::{
    coverage_population, estimate_popularity, hoeffding_sample_size, sampling_coverage, Coverage, PopularityEstimate,
    PopularitySample, SamplingPlan,
};
pub use select::{rrh_scores, select_cloud_cache, select_rrh_cache, top_k, update_distribution};
pub use state::CacheState;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CacheError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    Length { expected: usize, found: usize },
    #[error("content id {id} outside catalog of {catalog}")]
    UnknownContent { id: usize, catalog: usize },
    #[error("content id {0} appears twice in one cache")]
    Duplicate(usize),
    #[error("cache holds {len} contents but capacity is {capacity}")]
    Overfull { len: usize, capacity: usize },
    #[error("RRH index {0} out of range")]
    UnknownRrh(usize),
}

pub(crate) fn config_err(msg: &str) -> CacheError {
    CacheError::Config(String::from(msg))
}
