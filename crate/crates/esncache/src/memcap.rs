//! Memory-capacity tables: closed form or series, bounds, measurement.

use std::io::Write;

use esncache_core::esn::{empirical_memory_capacity, memory_capacity, memory_capacity_bounds, DEFAULT_SERIES_TOL};
use esncache_core::{EsnError, MobilityEsn, WeightDistribution};

pub const MEMCAP_HEADER: [&str; 6] = ["spec", "W", "analytic", "bound_lo", "bound_hi", "empirical"];

#[derive(Debug, Clone, PartialEq)]
pub struct MemcapRow {
    pub w: usize,
    pub analytic: f64,
    pub bounds: (f64, f64),
    pub empirical: Option<f64>,
}

pub fn spec_label(spec: WeightDistribution) -> String {
    match spec {
        WeightDistribution::PointMass(a) => format!("point({a})"),
        WeightDistribution::SymmetricBinary(a) => format!("binary({a})"),
        WeightDistribution::Uniform { lo, hi } => format!("uniform({lo}:{hi})"),
    }
}

/// One row per `W` in `ws`. With `empirical = Some((trace_len, seed))` a
/// cycle reservoir drawn from `spec` is also measured.
pub fn memcap_table(
    spec: WeightDistribution,
    ws: impl IntoIterator<Item = usize>,
    empirical: Option<(usize, u64)>,
) -> Result<Vec<MemcapRow>, EsnError> {
    ws.into_iter()
        .map(|w| {
            let analytic = memory_capacity(spec, w, DEFAULT_SERIES_TOL)?;
            let bounds = memory_capacity_bounds(spec, w)?;
            let empirical = match empirical {
                Some((len, seed)) => {
                    let esn = MobilityEsn::new(w, spec, 1, 0.0, seed)?;
                    Some(empirical_memory_capacity(&esn, w, len, seed)?)
                }
                None => None,
            };
            Ok(MemcapRow { w, analytic, bounds, empirical })
        })
        .collect()
}

pub fn write_table<W: Write>(out: W, spec: WeightDistribution, rows: &[MemcapRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MEMCAP_HEADER)?;
    let label = spec_label(spec);
    for r in rows {
        w.write_record([
            label.clone(),
            r.w.to_string(),
            r.analytic.to_string(),
            r.bounds.0.to_string(),
            r.bounds.1.to_string(),
            r.empirical.map_or_else(String::new, |v| v.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
