use alloc::string::String;
use alloc::vec::Vec;

use super::mobility::MobilitySchedule;
use super::workload::Workload;
use crate::esn::CONTEXT_WIDTH;

pub const CONTENT_HEADER: [&str; 10] = [
    "user_id", "slot", "t_hour", "weekday", "gender", "occupation", "age", "device", "reserved", "content_id",
];
pub const MOBILITY_HEADER: [&str; 4] = ["user_id", "t", "x_m", "y_m"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

/// One content request. `user_id` is 0-based, `slot` and `content_id` are
/// 1-based as written in trace files.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentTraceRow {
    pub user_id: usize,
    pub slot: usize,
    pub context: [f64; CONTEXT_WIDTH],
    pub content_id: usize,
}

impl ContentTraceRow {
    pub fn validate(&self, catalog: Option<usize>) -> Result<(), String> {
        if self.slot == 0 {
            return Err(String::from("slot must be at least 1"));
        }
        if self.content_id == 0 || catalog.is_some_and(|n| self.content_id > n) {
            return Err(String::from("content_id outside the catalog"));
        }
        if self.context.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(String::from("context features must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// One position sample in metres, cell-centred coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityTraceRow {
    pub user_id: usize,
    pub t: f64,
    pub x_m: f64,
    pub y_m: f64,
}

impl MobilityTraceRow {
    pub fn validate(&self, radius: f64) -> Result<(), String> {
        if !self.t.is_finite() || !self.x_m.is_finite() || !self.y_m.is_finite() {
            return Err(String::from("non-finite value"));
        }
        if libm::hypot(self.x_m, self.y_m) > radius {
            return Err(String::from("position outside the cell disk"));
        }
        Ok(())
    }
}

/// Requests of every user for slots `1..=slots`, user-major within a slot.
pub fn content_rows(workload: &Workload, slots: usize, seed: u64) -> Vec<ContentTraceRow> {
    let mut rows = Vec::with_capacity(slots * workload.users());
    for slot in 1..=slots {
        for user in 0..workload.users() {
            let mut context = [0.0; CONTEXT_WIDTH];
            context.copy_from_slice(workload.context(user, slot).as_slice());
            rows.push(ContentTraceRow {
                user_id: user,
                slot,
                context,
                content_id: workload.request(user, slot, seed) + 1,
            });
        }
    }
    rows
}

/// Positions every `every` slots over `0..slots`.
pub fn mobility_rows(schedules: &[MobilitySchedule], slots: usize, every: usize) -> Vec<MobilityTraceRow> {
    let every = every.max(1);
    let mut rows = Vec::new();
    for t in (0..slots).step_by(every) {
        for (u, s) in schedules.iter().enumerate() {
            let (x, y) = s.position_at(t as f64);
            rows.push(MobilityTraceRow { user_id: u, t: t as f64, x_m: x, y_m: y });
        }
    }
    rows
}
