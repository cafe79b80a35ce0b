//! Time-slotted episode simulation of the caching loop and its baselines.

mod episode;
mod geometry;
mod oracle;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cache::CacheError;
use crate::esn::EsnError;
use crate::qos::{QosError, RadioParams, WiredParams};

pub use episode::{run_episode, run_scenario, ContentReplay, Scenario};
pub use geometry::{associations, distance, nearest, step_towards, Grid, Point, MIN_DISTANCE_M};
pub use oracle::{combination_count, exhaustive_placement, expected_objective, greedy_placement, PathValues, Placement};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Esn(#[from] EsnError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Qos(#[from] QosError),
    #[error("exhaustive search needs {combinations} placements, above the limit of {limit}")]
    OracleTooLarge { combinations: f64, limit: f64 },
    #[error("trace: {0}")]
    Trace(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    Proposed,
    RandomWithClustering,
    RandomWithoutClustering,
    OptimalOracle,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::Proposed,
        PolicyKind::RandomWithClustering,
        PolicyKind::RandomWithoutClustering,
        PolicyKind::OptimalOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Proposed => "proposed",
            PolicyKind::RandomWithClustering => "random_clustered",
            PolicyKind::RandomWithoutClustering => "random_unclustered",
            PolicyKind::OptimalOracle => "oracle",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the caching decisions get demand and position forecasts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionSource {
    Esn,
    /// True distributions and positions.
    Truth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub radio: RadioParams,
    pub wired: WiredParams,
    pub rrhs: usize,
    pub users: usize,
    pub contents: usize,
    pub cloud_capacity: usize,
    pub rrh_capacity: usize,
    pub theta_o: f64,
    pub reservoir_units: usize,
    pub context_width: usize,
    pub content_lr: f64,
    pub spectral_radius: f64,
    pub reservoir_density: f64,
    pub input_scaling: f64,
    pub output_init: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// Slots between mobility samples.
    pub mobility_period: usize,
    /// Slots between cloud-cache updates.
    pub cloud_period: usize,
    pub slots: usize,
    /// Mobility samples forecast per prediction.
    pub horizon: usize,
    pub ridge_lambda: f64,
    pub chi: f64,
    pub mobility_units: usize,
    pub training_len: usize,
    pub cycle_weight: f64,
    pub zipf_alpha: f64,
    pub archetypes: usize,
    pub waypoints: usize,
    /// Metres per slot.
    pub speed: f64,
    pub slots_per_day: usize,
    pub stationary_demand: bool,
    pub grid_pitch: f64,
    pub n_mc: usize,
    pub substeps: usize,
    pub prediction: PredictionSource,
    /// Largest placement count the oracle will enumerate.
    pub oracle_limit: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            radio: RadioParams::default(),
            wired: WiredParams {
                backhaul_rate: 1.5e9,
                fronthaul_rate: 3e9,
                content_size: 1e7,
                delay_bound: 1.0,
            },
            rrhs: 1000,
            users: 96,
            contents: 50,
            cloud_capacity: 6,
            rrh_capacity: 3,
            theta_o: 0.05,
            reservoir_units: 1000,
            context_width: crate::esn::CONTEXT_WIDTH,
            content_lr: 0.01,
            spectral_radius: 0.9,
            reservoir_density: 0.1,
            input_scaling: 0.1,
            output_init: 0.01,
            epsilon: 0.05,
            delta: 0.05,
            mobility_period: 3,
            cloud_period: 30,
            slots: 300,
            horizon: 10,
            ridge_lambda: 0.5,
            chi: 0.85,
            mobility_units: 12,
            training_len: 40,
            cycle_weight: 0.9,
            zipf_alpha: 0.8,
            archetypes: 4,
            waypoints: 3,
            speed: 25.0,
            slots_per_day: 24,
            stationary_demand: false,
            grid_pitch: 50.0,
            n_mc: 32,
            substeps: 10,
            prediction: PredictionSource::Esn,
            oracle_limit: 1e6,
        }
    }
}

fn bad(msg: String) -> SimError {
    SimError::Config(msg)
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.radio.validate()?;
        self.wired.validate()?;
        let positive = [
            ("R", self.rrhs),
            ("U", self.users),
            ("N", self.contents),
            ("N_w", self.reservoir_units),
            ("H", self.mobility_period),
            ("T_tau", self.cloud_period),
            ("T", self.slots),
            ("N_s", self.horizon),
            ("W", self.mobility_units),
            ("N_tr", self.training_len),
            ("waypoints", self.waypoints),
            ("slots_per_day", self.slots_per_day),
            ("n_mc", self.n_mc),
            ("substeps", self.substeps),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(bad(format!("{name} must be positive")));
            }
        }
        if self.contents < 2 {
            return Err(bad(format!("N must be at least 2, got {}", self.contents)));
        }
        if self.context_width != crate::esn::CONTEXT_WIDTH {
            return Err(bad(format!("K must be {}", crate::esn::CONTEXT_WIDTH)));
        }
        if self.cloud_capacity > self.contents {
            return Err(bad(format!("C_c = {} exceeds N = {}", self.cloud_capacity, self.contents)));
        }
        if self.rrh_capacity > self.contents {
            return Err(bad(format!("C_r = {} exceeds N = {}", self.rrh_capacity, self.contents)));
        }
        if !self.slots.is_multiple_of(self.cloud_period) {
            return Err(bad(format!("T_tau = {} must divide T = {}", self.cloud_period, self.slots)));
        }
        if !(self.theta_o > 0.0 && self.theta_o.is_finite()) {
            return Err(bad(format!("theta_O must be positive, got {}", self.theta_o)));
        }
        if !(self.spectral_radius > 0.0 && self.spectral_radius < 1.0) {
            return Err(bad(String::from("spectral_radius must lie in (0, 1)")));
        }
        if !(self.reservoir_density > 0.0 && self.reservoir_density <= 1.0) {
            return Err(bad(String::from("reservoir_density must lie in (0, 1]")));
        }
        if !(self.cycle_weight.abs() < 1.0) {
            return Err(bad(String::from("cycle_weight must lie in (-1, 1)")));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) || !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(bad(String::from("epsilon must lie in (0, 1) and delta in (0, 1]")));
        }
        let nonneg = [
            ("lambda_alpha", self.content_lr),
            ("lambda", self.ridge_lambda),
            ("chi", self.chi),
            ("zipf_alpha", self.zipf_alpha),
            ("speed", self.speed),
            ("input_scaling", self.input_scaling),
            ("output_init", self.output_init),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(format!("{name} must be finite and non-negative")));
            }
        }
        if !(self.grid_pitch > 0.0) {
            return Err(bad(String::from("grid_pitch must be positive")));
        }
        Ok(())
    }
}

/// Outcome of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotMetrics {
    pub k: usize,
    pub e_k: f64,
    pub requests: usize,
    pub hits_o: usize,
    pub hits_a: usize,
    pub hits_g: usize,
    pub misses_s: usize,
    pub n_b: usize,
    pub n_f: usize,
    /// Requests whose path could not meet the delay bound.
    pub infeasible: usize,
    /// Mean L1 error of the demand forecasts this slot.
    pub demand_error: f64,
}

impl SlotMetrics {
    fn ratio(&self, n: usize) -> f64 {
        if self.requests == 0 {
            0.0
        } else {
            n as f64 / self.requests as f64
        }
    }

    pub fn hit_o(&self) -> f64 {
        self.ratio(self.hits_o)
    }

    pub fn hit_a(&self) -> f64 {
        self.ratio(self.hits_a)
    }

    pub fn hit_g(&self) -> f64 {
        self.ratio(self.hits_g)
    }

    pub fn miss_s(&self) -> f64 {
        self.ratio(self.misses_s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeReport {
    pub policy: PolicyKind,
    pub seed: u64,
    pub slots: Vec<SlotMetrics>,
    /// Long-term average of the per-slot sum effective capacity, Mbit/s.
    pub mean_e: f64,
    /// Cloud contents chosen at each update, with the slot it took effect.
    pub cloud_trace: Vec<(usize, Vec<usize>)>,
}
