//! Synthetic workloads, periodic mobility and trace records.

mod mobility;
mod trace;
mod workload;

pub(crate) use mobility::disk_point;
pub use mobility::{generate_mobility, MobilityConfig, MobilitySchedule, Trajectory};
pub use trace::{
    content_rows, mobility_rows, ContentTraceRow, DataError, MobilityTraceRow, CONTENT_HEADER, MOBILITY_HEADER,
};
pub use workload::{
    sample_index, slot_calendar, zipf, Archetype, Calendar, Workload, WorkloadConfig, BUCKETS,
};
