//! Proactive content caching for cloud radio access networks.
//!
//! Per-user echo state networks forecast content demand (a tanh reservoir
//! trained online) and periodic mobility (a linear cycle reservoir trained by
//! ridge regression). A sampling-based placement engine turns the forecasts
//! into RRH-cache and cloud-cache contents, and an effective-capacity link
//! model scores every slot of a simulated episode.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration
//! files and the command line live in the `esncache` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cache;
pub mod data;
pub mod esn;
pub mod qos;
pub mod rng;
pub mod sim;

pub use cache::{CacheError, CacheState, ClusterSet, SamplingPlan};
pub use esn::{ContentDistribution, ContentEsn, ContextVector, EsnError, MobilityEsn, WeightDistribution};
pub use qos::{LinkQos, Path, QosError, RadioParams, WiredParams};
pub use sim::{EpisodeReport, PolicyKind, SimConfig, SimError};
