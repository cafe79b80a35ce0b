//! Per-slot series and run summaries.

use std::fmt::Write as _;
use std::io::Write;

use esncache_core::EpisodeReport;

pub const SLOT_HEADER: [&str; 8] = ["k", "E_k", "hit_O", "hit_A", "hit_G", "miss_S", "N_B", "N_F"];

pub fn write_slots<W: Write>(out: W, report: &EpisodeReport) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SLOT_HEADER)?;
    for m in &report.slots {
        w.write_record([
            m.k.to_string(),
            m.e_k.to_string(),
            m.hit_o().to_string(),
            m.hit_a().to_string(),
            m.hit_g().to_string(),
            m.miss_s().to_string(),
            m.n_b.to_string(),
            m.n_f.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Episode totals as `key = value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Totals {
    pub e_bar: f64,
    pub hit_o: f64,
    pub hit_a: f64,
    pub hit_g: f64,
    pub miss_s: f64,
    pub mean_n_b: f64,
    pub mean_n_f: f64,
    pub infeasible: usize,
    pub demand_error: f64,
}

impl Totals {
    pub fn of(report: &EpisodeReport) -> Self {
        let slots = report.slots.len().max(1) as f64;
        let requests: usize = report.slots.iter().map(|m| m.requests).sum();
        let ratio = |f: fn(&esncache_core::sim::SlotMetrics) -> usize| {
            if requests == 0 {
                0.0
            } else {
                report.slots.iter().map(f).sum::<usize>() as f64 / requests as f64
            }
        };
        Self {
            e_bar: report.mean_e,
            hit_o: ratio(|m| m.hits_o),
            hit_a: ratio(|m| m.hits_a),
            hit_g: ratio(|m| m.hits_g),
            miss_s: ratio(|m| m.misses_s),
            mean_n_b: report.slots.iter().map(|m| m.n_b as f64).sum::<f64>() / slots,
            mean_n_f: report.slots.iter().map(|m| m.n_f as f64).sum::<f64>() / slots,
            infeasible: report.slots.iter().map(|m| m.infeasible).sum(),
            demand_error: report.slots.iter().map(|m| m.demand_error).sum::<f64>() / slots,
        }
    }

    /// `(metric, value)` pairs in output order.
    pub fn metrics(&self) -> [(&'static str, f64); 9] {
        [
            ("E_bar", self.e_bar),
            ("hit_O", self.hit_o),
            ("hit_A", self.hit_a),
            ("hit_G", self.hit_g),
            ("miss_S", self.miss_s),
            ("N_B", self.mean_n_b),
            ("N_F", self.mean_n_f),
            ("infeasible", self.infeasible as f64),
            ("demand_error", self.demand_error),
        ]
    }
}

pub fn summary(report: &EpisodeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "policy = {}", report.policy);
    let _ = writeln!(out, "seed = {}", report.seed);
    let _ = writeln!(out, "slots = {}", report.slots.len());
    for (k, v) in Totals::of(report).metrics() {
        let _ = writeln!(out, "{k} = {v}");
    }
    let updates: Vec<String> = report
        .cloud_trace
        .iter()
        .map(|(k, ids)| {
            let ids: Vec<String> = ids.iter().map(|n| (n + 1).to_string()).collect();
            format!("{k}:{}", ids.join(" "))
        })
        .collect();
    let _ = writeln!(out, "cloud_updates = {}", updates.join(";"));
    out
}
