//! Link model: wired rate split, QoS-exponent mapping across delivery paths,
//! SINR and effective capacity.

mod capacity;
mod radio;

use alloc::string::String;
use core::fmt;

pub use capacity::{effective_capacity, effective_capacity_mc, long_term_average, sum_effective_capacity};
pub use radio::{db_to_linear, dbm_to_watts, received_power, sinr, slot_capacity, ChannelDraw, RadioParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QosError {
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("path {path} cannot meet the delay bound (exponent denominator {denominator})")]
    Infeasible { path: Path, denominator: f64 },
    #[error("zero distance between transmitter and receiver")]
    Geometry,
}

fn invalid(msg: &str) -> QosError {
    QosError::Invalid(String::from(msg))
}

/// How a requested content reaches the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Path {
    /// Serving RRH cache.
    O,
    /// Cloud cache over the fronthaul.
    A,
    /// Content server over backhaul and fronthaul.
    S,
    /// Remote RRH cache, relayed through the BBUs.
    G,
}

impl Path {
    pub const ALL: [Path; 4] = [Path::O, Path::A, Path::S, Path::G];

    /// Wired hops charged against the delay bound.
    pub fn hops(self) -> u32 {
        match self {
            Path::O => 0,
            Path::A => 1,
            Path::S | Path::G => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Path::O => "O",
            Path::A => "A",
            Path::S => "S",
            Path::G => "G",
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Wired side of the network. Rates in bit/s, size in bits, bound in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WiredParams {
    pub backhaul_rate: f64,
    pub fronthaul_rate: f64,
    pub content_size: f64,
    pub delay_bound: f64,
}

impl Default for WiredParams {
    fn default() -> Self {
        Self {
            backhaul_rate: 4e9,
            fronthaul_rate: 1e10,
            content_size: 1e7,
            delay_bound: 1.0,
        }
    }
}

impl WiredParams {
    pub fn validate(&self) -> Result<(), QosError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.backhaul_rate) && ok(self.fronthaul_rate) && ok(self.content_size) && ok(self.delay_bound) {
            Ok(())
        } else {
            Err(invalid("wired rates, content size and delay bound must be positive"))
        }
    }
}

/// Per-content share of a wired link carrying `requests` contents. An idle
/// link offers its full rate.
pub fn per_content_rate(rate: f64, requests: usize) -> f64 {
    if requests == 0 {
        rate
    } else {
        rate / requests as f64
    }
}

/// QoS exponents of the four delivery paths for a common delay guarantee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkQos {
    pub theta_o: f64,
    pub theta_a: f64,
    pub theta_s: f64,
    pub theta_g: f64,
}

impl LinkQos {
    pub fn theta(&self, path: Path) -> f64 {
        match path {
            Path::O => self.theta_o,
            Path::A => self.theta_a,
            Path::S => self.theta_s,
            Path::G => self.theta_g,
        }
    }
}

/// Exponent a path must meet so that its delay-violation probability equals
/// that of a zero-hop link with exponent `theta_o`.
///
/// `v_bu` and `v_fu` are the per-content backhaul and fronthaul rates.
pub fn path_exponent(path: Path, theta_o: f64, wired: &WiredParams, v_bu: f64, v_fu: f64) -> Result<f64, QosError> {
    let rate = match path {
        Path::O => return Ok(theta_o),
        Path::S => v_bu,
        Path::A | Path::G => v_fu,
    };
    if !(rate > 0.0) {
        return Err(QosError::Infeasible { path, denominator: f64::NEG_INFINITY });
    }
    let denominator = 1.0 - path.hops() as f64 * wired.content_size / (rate * wired.delay_bound);
    if denominator > 0.0 {
        Ok(theta_o / denominator)
    } else {
        Err(QosError::Infeasible { path, denominator })
    }
}

pub fn map_qos_exponents(theta_o: f64, wired: &WiredParams, v_bu: f64, v_fu: f64) -> Result<LinkQos, QosError> {
    Ok(LinkQos {
        theta_o,
        theta_a: path_exponent(Path::A, theta_o, wired, v_bu, v_fu)?,
        theta_s: path_exponent(Path::S, theta_o, wired, v_bu, v_fu)?,
        theta_g: path_exponent(Path::G, theta_o, wired, v_bu, v_fu)?,
    })
}

/// `exp(-θ (D_max - N_h L / v))`, the probability that delivery over
/// `hops` wired hops at `rate` misses the delay bound.
pub fn delay_violation_prob(theta: f64, delay_bound: f64, hops: u32, content_size: f64, rate: f64) -> Result<f64, QosError> {
    let wired_delay = if hops == 0 { 0.0 } else { hops as f64 * content_size / rate };
    let slack = delay_bound - wired_delay;
    if !(slack > 0.0) {
        return Err(invalid("wired delay exceeds the delay bound"));
    }
    if theta == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(libm::exp(-theta * slack))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_split() {
        assert_eq!(per_content_rate(100e6, 1), 100e6);
        assert_eq!(per_content_rate(100e6, 4), 25e6);
        assert_eq!(per_content_rate(100e6, 0), 100e6);
    }

    #[test]
    fn exponent_mapping_examples() {
        let wired = WiredParams { content_size: 1e7, delay_bound: 1.0, ..WiredParams::default() };
        let theta_s = path_exponent(Path::S, 0.05, &wired, 40e6, 1e9).unwrap();
        assert!((theta_s - 0.1).abs() < 1e-15);
        assert!(matches!(
            path_exponent(Path::G, 0.05, &wired, 1e9, 20e6),
            Err(QosError::Infeasible { path: Path::G, .. })
        ));
        let tiny = WiredParams { content_size: 1e-12, ..wired };
        let q = map_qos_exponents(0.05, &tiny, 1e6, 1e6).unwrap();
        for p in Path::ALL {
            assert!((q.theta(p) - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn violation_probability() {
        assert_eq!(delay_violation_prob(0.0, 1.0, 1, 5.0, 10.0).unwrap(), 1.0);
        let p = delay_violation_prob(0.1, 1.0, 1, 5.0, 10.0).unwrap();
        assert!((p - 0.951_229_424_500_714).abs() < 1e-12);
        assert_eq!(delay_violation_prob(f64::INFINITY, 1.0, 1, 5.0, 10.0).unwrap(), 0.0);
        assert!(delay_violation_prob(0.1, 1.0, 2, 5.0, 10.0).is_err());
    }

    #[test]
    fn mapped_exponents_equalize_violation() {
        let wired = WiredParams { content_size: 1e7, delay_bound: 1.0, ..WiredParams::default() };
        let (v_bu, v_fu) = (50e6, 80e6);
        let q = map_qos_exponents(0.05, &wired, v_bu, v_fu).unwrap();
        let base = delay_violation_prob(q.theta_o, 1.0, 0, 1e7, v_bu).unwrap();
        let s = delay_violation_prob(q.theta_s, 1.0, 2, 1e7, v_bu).unwrap();
        let a = delay_violation_prob(q.theta_a, 1.0, 1, 1e7, v_fu).unwrap();
        let g = delay_violation_prob(q.theta_g, 1.0, 2, 1e7, v_fu).unwrap();
        for p in [s, a, g] {
            assert!((p - base).abs() < 1e-12);
        }
        assert!(q.theta_o <= q.theta_a && q.theta_a <= q.theta_g);
    }
}
