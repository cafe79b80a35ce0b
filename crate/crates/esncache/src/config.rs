//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment and blank lines are
//! ignored. Every key has a default, unknown or repeated keys are errors,
//! and [`ExperimentConfig::to_canonical`] writes every key once in a fixed
//! order so that parsing and re-serializing a file yields its canonical form.

use std::fmt::Write as _;
use std::str::FromStr;

use esncache_core::sim::PredictionSource;
use esncache_core::{PolicyKind, SimConfig};

use crate::error::CliError;
use crate::sweep::SweepAxis;

/// Every key, in canonical order. Radio powers are in dBm, `B` in Hz, `L`
/// in bits, wired rates in bit/s and `D_max` in seconds.
pub const KEYS: [&str; 49] = [
    "r",
    "R",
    "B",
    "L",
    "theta_s_O",
    "N_w",
    "C_c",
    "C_r",
    "K",
    "delta",
    "epsilon",
    "H",
    "T_tau",
    "P",
    "beta",
    "lambda_alpha",
    "T",
    "sigma2",
    "D_max",
    "N_s",
    "lambda",
    "chi",
    "U",
    "N",
    "v_B",
    "v_F",
    "W",
    "N_tr",
    "a",
    "spectral_radius",
    "reservoir_density",
    "input_scaling",
    "output_init",
    "zipf_alpha",
    "archetypes",
    "waypoints",
    "speed",
    "slots_per_day",
    "stationary_demand",
    "grid_pitch",
    "n_mc",
    "substeps",
    "prediction",
    "oracle_limit",
    "seed",
    "policies",
    "sweep_axis",
    "sweep_values",
    "repetitions",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sim: SimConfig,
    pub seed: u64,
    pub policies: Vec<PolicyKind>,
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    /// Seeds per sweep point.
    pub repetitions: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            seed: 1,
            policies: PolicyKind::ALL.to_vec(),
            sweep_axis: SweepAxis::CloudCapacity,
            sweep_values: vec![1.0, 2.0, 4.0, 6.0],
            repetitions: 20,
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse {value:?}")))
}

fn flag(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

pub fn parse_policies(value: &str) -> Result<Vec<PolicyKind>, CliError> {
    if value == "all" {
        return Ok(PolicyKind::ALL.to_vec());
    }
    let mut out = Vec::new();
    for name in value.split(',').map(str::trim) {
        let p = PolicyKind::parse(name).ok_or_else(|| CliError::Config(format!("policies: unknown policy {name:?}")))?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config(String::from("policies: empty list")));
    }
    Ok(out)
}

pub fn parse_values(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let out: Vec<f64> = value
        .split(',')
        .map(|v| num::<f64>(key, v.trim()))
        .collect::<Result<_, _>>()?;
    if out.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config(format!("{key}: values must be finite")));
    }
    Ok(out)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let s = &mut self.sim;
        match key {
            "r" => s.radio.cell_radius_m = num(key, value)?,
            "R" => s.rrhs = num(key, value)?,
            "B" => s.radio.bandwidth_hz = num(key, value)?,
            "L" => s.wired.content_size = num(key, value)?,
            "theta_s_O" => s.theta_o = num(key, value)?,
            "N_w" => s.reservoir_units = num(key, value)?,
            "C_c" => s.cloud_capacity = num(key, value)?,
            "C_r" => s.rrh_capacity = num(key, value)?,
            "K" => s.context_width = num(key, value)?,
            "delta" => s.delta = num(key, value)?,
            "epsilon" => s.epsilon = num(key, value)?,
            "H" => s.mobility_period = num(key, value)?,
            "T_tau" => s.cloud_period = num(key, value)?,
            "P" => s.radio.tx_power_dbm = num(key, value)?,
            "beta" => s.radio.pathloss_exponent = num(key, value)?,
            "lambda_alpha" => s.content_lr = num(key, value)?,
            "T" => s.slots = num(key, value)?,
            "sigma2" => s.radio.noise_dbm = num(key, value)?,
            "D_max" => s.wired.delay_bound = num(key, value)?,
            "N_s" => s.horizon = num(key, value)?,
            "lambda" => s.ridge_lambda = num(key, value)?,
            "chi" => s.chi = num(key, value)?,
            "U" => s.users = num(key, value)?,
            "N" => s.contents = num(key, value)?,
            "v_B" => s.wired.backhaul_rate = num(key, value)?,
            "v_F" => s.wired.fronthaul_rate = num(key, value)?,
            "W" => s.mobility_units = num(key, value)?,
            "N_tr" => s.training_len = num(key, value)?,
            "a" => s.cycle_weight = num(key, value)?,
            "spectral_radius" => s.spectral_radius = num(key, value)?,
            "reservoir_density" => s.reservoir_density = num(key, value)?,
            "input_scaling" => s.input_scaling = num(key, value)?,
            "output_init" => s.output_init = num(key, value)?,
            "zipf_alpha" => s.zipf_alpha = num(key, value)?,
            "archetypes" => s.archetypes = num(key, value)?,
            "waypoints" => s.waypoints = num(key, value)?,
            "speed" => s.speed = num(key, value)?,
            "slots_per_day" => s.slots_per_day = num(key, value)?,
            "stationary_demand" => s.stationary_demand = flag(key, value)?,
            "grid_pitch" => s.grid_pitch = num(key, value)?,
            "n_mc" => s.n_mc = num(key, value)?,
            "substeps" => s.substeps = num(key, value)?,
            "prediction" => {
                s.prediction = match value {
                    "esn" => PredictionSource::Esn,
                    "truth" => PredictionSource::Truth,
                    _ => return Err(CliError::Config(format!("prediction: expected esn or truth, got {value:?}"))),
                }
            }
            "oracle_limit" => s.oracle_limit = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "policies" => self.policies = parse_policies(value)?,
            "sweep_axis" => {
                self.sweep_axis = SweepAxis::parse(value)
                    .ok_or_else(|| CliError::Config(format!("sweep_axis: unknown axis {value:?}")))?
            }
            "sweep_values" => self.sweep_values = parse_values(key, value)?,
            "repetitions" => self.repetitions = num(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let s = &self.sim;
        Some(match key {
            "r" => s.radio.cell_radius_m.to_string(),
            "R" => s.rrhs.to_string(),
            "B" => s.radio.bandwidth_hz.to_string(),
            "L" => s.wired.content_size.to_string(),
            "theta_s_O" => s.theta_o.to_string(),
            "N_w" => s.reservoir_units.to_string(),
            "C_c" => s.cloud_capacity.to_string(),
            "C_r" => s.rrh_capacity.to_string(),
            "K" => s.context_width.to_string(),
            "delta" => s.delta.to_string(),
            "epsilon" => s.epsilon.to_string(),
            "H" => s.mobility_period.to_string(),
            "T_tau" => s.cloud_period.to_string(),
            "P" => s.radio.tx_power_dbm.to_string(),
            "beta" => s.radio.pathloss_exponent.to_string(),
            "lambda_alpha" => s.content_lr.to_string(),
            "T" => s.slots.to_string(),
            "sigma2" => s.radio.noise_dbm.to_string(),
            "D_max" => s.wired.delay_bound.to_string(),
            "N_s" => s.horizon.to_string(),
            "lambda" => s.ridge_lambda.to_string(),
            "chi" => s.chi.to_string(),
            "U" => s.users.to_string(),
            "N" => s.contents.to_string(),
            "v_B" => s.wired.backhaul_rate.to_string(),
            "v_F" => s.wired.fronthaul_rate.to_string(),
            "W" => s.mobility_units.to_string(),
            "N_tr" => s.training_len.to_string(),
            "a" => s.cycle_weight.to_string(),
            "spectral_radius" => s.spectral_radius.to_string(),
            "reservoir_density" => s.reservoir_density.to_string(),
            "input_scaling" => s.input_scaling.to_string(),
            "output_init" => s.output_init.to_string(),
            "zipf_alpha" => s.zipf_alpha.to_string(),
            "archetypes" => s.archetypes.to_string(),
            "waypoints" => s.waypoints.to_string(),
            "speed" => s.speed.to_string(),
            "slots_per_day" => s.slots_per_day.to_string(),
            "stationary_demand" => s.stationary_demand.to_string(),
            "grid_pitch" => s.grid_pitch.to_string(),
            "n_mc" => s.n_mc.to_string(),
            "substeps" => s.substeps.to_string(),
            "prediction" => match s.prediction {
                PredictionSource::Esn => "esn".into(),
                PredictionSource::Truth => "truth".into(),
            },
            "oracle_limit" => s.oracle_limit.to_string(),
            "seed" => self.seed.to_string(),
            "policies" => join(&self.policies.iter().map(|p| p.name()).collect::<Vec<_>>()),
            "sweep_axis" => self.sweep_axis.name().to_string(),
            "sweep_values" => join(&self.sweep_values),
            "repetitions" => self.repetitions.to_string(),
            _ => return None,
        })
    }

    /// Parse a configuration file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen = std::collections::BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| CliError::Config(format!("line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) && KEYS.contains(&key) {
                return Err(at(format!("duplicate key {key:?}")));
            }
            cfg.set(key, value).map_err(|e| at(e.message()))?;
        }
        Ok(cfg)
    }

    /// Apply `KEY=VAL` overrides in order.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), CliError> {
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override {o:?} is not KEY=VAL")))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("override {o:?}: {}", e.message())))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.sim.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.repetitions == 0 {
            return Err(CliError::Config(String::from("repetitions must be positive")));
        }
        if self.sweep_values.is_empty() {
            return Err(CliError::Config(String::from("sweep_values: empty list")));
        }
        Ok(())
    }

    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = self.get(key).expect("every listed key has a value");
            writeln!(out, "{key} = {value}").expect("writing to a String");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_round_trips() {
        let cfg = ExperimentConfig::default();
        for key in KEYS {
            let v = cfg.get(key).unwrap();
            let mut c = ExperimentConfig::default();
            c.set(key, &v).unwrap();
            assert_eq!(c, cfg, "{key}");
        }
        assert_eq!(ExperimentConfig::parse(&cfg.to_canonical()).unwrap(), cfg);
    }

    #[test]
    fn comments_overrides_and_errors() {
        let mut cfg = ExperimentConfig::parse("# desk scale\nR = 32   # fewer RRHs\n\nU=64\n").unwrap();
        assert_eq!((cfg.sim.rrhs, cfg.sim.users), (32, 64));
        cfg.apply_overrides(&["C_c=1".into(), "policies=proposed,oracle".into()]).unwrap();
        assert_eq!(cfg.sim.cloud_capacity, 1);
        assert_eq!(cfg.policies, vec![PolicyKind::Proposed, PolicyKind::OptimalOracle]);

        let err = ExperimentConfig::parse("R = 3\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2") && err.to_string().contains("bogus"));
        assert!(ExperimentConfig::parse("R = 3\nR = 4\n").is_err());
        assert!(ExperimentConfig::parse("R = x\n").unwrap_err().to_string().contains("R"));
        assert!(cfg.apply_overrides(&["C_c".into()]).is_err());
    }
}
