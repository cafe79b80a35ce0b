use super::{invalid, QosError};

/// Radio parameters in the units of the configuration (dBm, Hz, metres).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub tx_power_dbm: f64,
    pub pathloss_exponent: f64,
    pub noise_dbm: f64,
    pub bandwidth_hz: f64,
    pub cell_radius_m: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            tx_power_dbm: 20.0,
            pathloss_exponent: 4.0,
            noise_dbm: -95.0,
            bandwidth_hz: 1e6,
            cell_radius_m: 1000.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), QosError> {
        if !(self.pathloss_exponent > 2.0) {
            return Err(invalid("path-loss exponent must exceed 2"));
        }
        if !(self.bandwidth_hz > 0.0) || !(self.cell_radius_m > 0.0) {
            return Err(invalid("bandwidth and cell radius must be positive"));
        }
        if !self.tx_power_dbm.is_finite() || !self.noise_dbm.is_finite() {
            return Err(invalid("powers must be finite"));
        }
        Ok(())
    }

    pub fn tx_power_w(&self) -> f64 {
        dbm_to_watts(self.tx_power_dbm)
    }

    pub fn noise_w(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// One transmitter-to-user link at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub distance_m: f64,
    /// Rayleigh power gain `|h|²`, unit-mean exponential.
    pub fading: f64,
}

/// `P d^-β |h|²` in watts.
pub fn received_power(tx_power_w: f64, pathloss_exponent: f64, draw: ChannelDraw) -> Result<f64, QosError> {
    if !(draw.distance_m > 0.0) {
        return Err(QosError::Geometry);
    }
    Ok(tx_power_w * libm::pow(draw.distance_m, -pathloss_exponent) * draw.fading)
}

/// Linear SINR of `serving` against `interferers`, all at the same power.
pub fn sinr(radio: &RadioParams, serving: ChannelDraw, interferers: &[ChannelDraw]) -> Result<f64, QosError> {
    let p = radio.tx_power_w();
    let signal = received_power(p, radio.pathloss_exponent, serving)?;
    let mut interference = 0.0;
    for &d in interferers {
        interference += received_power(p, radio.pathloss_exponent, d)?;
    }
    Ok(signal / (interference + radio.noise_w()))
}

/// Cumulative capacity `Σ B log₂(1 + γ)` over unit-length sub-steps.
pub fn slot_capacity(gammas: &[f64], bandwidth_hz: f64) -> f64 {
    gammas.iter().map(|g| bandwidth_hz * libm::log2(1.0 + g)).sum()
}
