//! Parameter sweeps emitted as long-format rows.

use std::io::Write;

use esncache_core::cache::{coverage_population, sampling_coverage, SamplingPlan};
use esncache_core::sim::{combination_count, run_episode};
use esncache_core::{PolicyKind, SimConfig};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::Totals;

pub const SWEEP_HEADER: [&str; 6] = ["axis", "value", "policy", "seed", "metric", "metric_value"];

/// Population size and trial count of the sampling-coverage rows emitted on
/// the `epsilon` and `delta` axes.
const COVERAGE_POPULATION: usize = 20_000;
const COVERAGE_TRIALS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    CloudCapacity,
    Rrhs,
    Users,
    Epsilon,
    Delta,
    MobilityUnits,
    TrainingLen,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 7] = [
        SweepAxis::CloudCapacity,
        SweepAxis::Rrhs,
        SweepAxis::Users,
        SweepAxis::Epsilon,
        SweepAxis::Delta,
        SweepAxis::MobilityUnits,
        SweepAxis::TrainingLen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::CloudCapacity => "C_c",
            SweepAxis::Rrhs => "R",
            SweepAxis::Users => "U",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::Delta => "delta",
            SweepAxis::MobilityUnits => "W",
            SweepAxis::TrainingLen => "N_tr",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }

    fn samples_popularity(self) -> bool {
        matches!(self, SweepAxis::Epsilon | SweepAxis::Delta)
    }

    pub fn apply(self, cfg: &mut SimConfig, value: f64) -> Result<(), CliError> {
        let count = || {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(CliError::Config(format!("{}: {value} is not a count", self.name())))
            }
        };
        match self {
            SweepAxis::CloudCapacity => cfg.cloud_capacity = count()?,
            SweepAxis::Rrhs => cfg.rrhs = count()?,
            SweepAxis::Users => cfg.users = count()?,
            SweepAxis::Epsilon => cfg.epsilon = value,
            SweepAxis::Delta => cfg.delta = value,
            SweepAxis::MobilityUnits => cfg.mobility_units = count()?,
            SweepAxis::TrainingLen => cfg.training_len = count()?,
        }
        cfg.validate().map_err(|e| CliError::Config(format!("{} = {value}: {e}", self.name())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub policy: String,
    pub seed: u64,
    pub metric: &'static str,
    pub metric_value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Points where the oracle was skipped because the instance is too large.
    pub skipped: Vec<(f64, PolicyKind)>,
}

enum Job {
    Episode { value: f64, cfg: Box<SimConfig>, policy: PolicyKind, seed: u64 },
    Coverage { value: f64, plan: SamplingPlan, seed: u64 },
}

fn oracle_fits(cfg: &SimConfig) -> bool {
    let count = combination_count(cfg.contents, cfg.cloud_capacity, cfg.rrh_capacity, cfg.rrhs, true);
    count <= cfg.oracle_limit
}

/// Run every `(value, policy, repetition)` point in parallel. Seeds are
/// `base.seed + repetition`; rows come back in value, policy, seed order.
pub fn run_sweep(base: &ExperimentConfig) -> Result<SweepOutput, CliError> {
    let axis = base.sweep_axis;
    let mut jobs = Vec::new();
    let mut skipped = Vec::new();
    for &value in &base.sweep_values {
        let mut cfg = base.sim.clone();
        axis.apply(&mut cfg, value)?;
        for &policy in &base.policies {
            if policy == PolicyKind::OptimalOracle && !oracle_fits(&cfg) {
                skipped.push((value, policy));
                continue;
            }
            for rep in 0..base.repetitions as u64 {
                jobs.push(Job::Episode { value, cfg: Box::new(cfg.clone()), policy, seed: base.seed + rep });
            }
        }
        if axis.samples_popularity() {
            let plan = SamplingPlan::new(cfg.epsilon, cfg.delta).map_err(|e| CliError::Config(e.to_string()))?;
            for rep in 0..base.repetitions as u64 {
                jobs.push(Job::Coverage { value, plan, seed: base.seed + rep });
            }
        }
    }

    let per_job: Vec<Vec<SweepRow>> = jobs
        .par_iter()
        .map(|job| -> Result<Vec<SweepRow>, CliError> {
            match job {
                Job::Episode { value, cfg, policy, seed } => {
                    let report = run_episode(cfg, *policy, *seed)?;
                    Ok(Totals::of(&report)
                        .metrics()
                        .into_iter()
                        .map(|(metric, metric_value)| SweepRow {
                            axis,
                            value: *value,
                            policy: policy.name().to_string(),
                            seed: *seed,
                            metric,
                            metric_value,
                        })
                        .collect())
                }
                Job::Coverage { value, plan, seed } => {
                    let population = coverage_population(COVERAGE_POPULATION, *seed);
                    let c = sampling_coverage(&population, plan, COVERAGE_TRIALS, *seed)
                        .map_err(|e| CliError::Config(e.to_string()))?;
                    let row = |metric, metric_value| SweepRow {
                        axis,
                        value: *value,
                        policy: String::from("sampling"),
                        seed: *seed,
                        metric,
                        metric_value,
                    };
                    Ok(vec![
                        row("sample_size", plan.sample_size as f64),
                        row("failure_rate", c.failure_rate()),
                        row("mean_abs_error", c.mean_abs_error),
                    ])
                }
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepOutput { rows: per_job.into_iter().flatten().collect(), skipped })
}

pub fn write_rows<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.axis.name().to_string(),
            r.value.to_string(),
            r.policy.clone(),
            r.seed.to_string(),
            r.metric.to_string(),
            r.metric_value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
