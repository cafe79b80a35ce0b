//! Command-line entry point.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use esncache_core::cache::hoeffding_sample_size;
use esncache_core::data::{content_rows, generate_mobility, mobility_rows, MobilityConfig, Workload, WorkloadConfig};
use esncache_core::sim::{combination_count, run_scenario, Scenario};
use esncache_core::{PolicyKind, WeightDistribution};

use crate::config::{parse_policies, parse_values, ExperimentConfig};
use crate::error::CliError;
use crate::sweep::SweepAxis;
use crate::{memcap, report, sweep, traces};

#[derive(Debug, Parser)]
#[command(name = "esncache", version, about = "Proactive C-RAN caching simulator")]
pub struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Set a configuration key after the file is read; repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VAL")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one episode per policy and write per-slot series and summaries.
    Simulate {
        /// A policy name, a comma list, or `all`.
        #[arg(long)]
        policy: Option<String>,
        #[arg(long)]
        content_trace: Option<PathBuf>,
        #[arg(long)]
        mobility_trace: Option<PathBuf>,
    },
    /// Sweep one axis and write a long-format CSV.
    Sweep {
        /// One of C_c, R, U, epsilon, delta, W, N_tr.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated axis values.
        #[arg(long)]
        values: Option<String>,
        #[arg(long)]
        repetitions: Option<usize>,
        #[arg(long)]
        policy: Option<String>,
    },
    /// Tabulate memory capacity of cycle reservoirs against W.
    Memcap {
        /// point, binary or uniform.
        #[arg(long, default_value = "point")]
        family: String,
        /// Weight of the point and binary families.
        #[arg(long, default_value_t = 0.9)]
        a: f64,
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 1)]
        w_min: usize,
        #[arg(long, default_value_t = 20)]
        w_max: usize,
        #[arg(long, default_value_t = 20_000)]
        trace_len: usize,
        /// Skip the empirical column.
        #[arg(long)]
        analytic_only: bool,
    },
    /// Print the Hoeffding sample size for (epsilon, delta).
    SampleSize {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Write synthetic content and mobility traces.
    GenData {
        /// Slots to generate; defaults to T.
        #[arg(long)]
        slots: Option<usize>,
        /// Slots between mobility samples; defaults to H.
        #[arg(long)]
        every: Option<usize>,
    },
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            ExperimentConfig::parse(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))?
        }
        None => ExperimentConfig::default(),
    };
    cfg.apply_overrides(&cli.overrides)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    File::create(&path).map(BufWriter::new).map_err(|e| CliError::io(&path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e.to_string()))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let mut f = create(dir, name)?;
    f.write_all(text.as_bytes())
        .and_then(|_| f.flush())
        .map_err(|e| CliError::io(&dir.join(name), e))
}

fn read_trace<T>(
    path: &Path,
    parse: impl FnOnce(File) -> Result<Vec<T>, esncache_core::data::DataError>,
) -> Result<Vec<T>, CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse(file).map_err(|source| CliError::Trace { path: path.display().to_string(), source })
}

fn simulate(
    cfg: &ExperimentConfig,
    out: &Path,
    policy: Option<&str>,
    content: Option<&Path>,
    mobility: Option<&Path>,
) -> Result<(), CliError> {
    let policies = match policy {
        Some(p) => parse_policies(p)?,
        None => cfg.policies.clone(),
    };
    let sim = &cfg.sim;
    let content = content
        .map(|p| read_trace(p, |f| traces::read_content(f, Some(sim.contents))))
        .transpose()?;
    let mobility = mobility
        .map(|p| read_trace(p, |f| traces::read_mobility(f, sim.radio.cell_radius_m)))
        .transpose()?;
    let scenario = Scenario::with_traces(sim, cfg.seed, content.as_deref(), mobility.as_deref())?;
    write_text(out, "config.txt", &cfg.to_canonical())?;

    let gated = policies.len() > 1;
    for policy in policies {
        let name = policy.name();
        if gated && policy == PolicyKind::OptimalOracle {
            let count = combination_count(sim.contents, sim.cloud_capacity, sim.rrh_capacity, sim.rrhs, true);
            if count > sim.oracle_limit {
                eprintln!("oracle skipped: {count} placements exceed the limit of {}", sim.oracle_limit);
                write_text(out, &format!("{name}_summary.txt"), &format!("policy = {name}\nstatus = refused\n"))?;
                continue;
            }
        }
        let report = run_scenario(sim, &scenario, policy, cfg.seed)?;
        let slots_name = format!("{name}_slots.csv");
        report::write_slots(create(out, &slots_name)?, &report).map_err(|e| csv_io(&out.join(&slots_name), e))?;
        write_text(out, &format!("{name}_summary.txt"), &report::summary(&report))?;
        eprintln!("{name}: E_bar = {}", report.mean_e);
    }
    Ok(())
}

fn run_sweep_cmd(
    cfg: &mut ExperimentConfig,
    out: &Path,
    axis: Option<&str>,
    values: Option<&str>,
    repetitions: Option<usize>,
    policy: Option<&str>,
) -> Result<(), CliError> {
    if let Some(a) = axis {
        cfg.sweep_axis = SweepAxis::parse(a).ok_or_else(|| CliError::Config(format!("unknown sweep axis {a:?}")))?;
    }
    if let Some(v) = values {
        cfg.sweep_values = parse_values("values", v)?;
    }
    if let Some(r) = repetitions {
        cfg.repetitions = r;
    }
    if let Some(p) = policy {
        cfg.policies = parse_policies(p)?;
    }
    cfg.validate()?;
    let result = sweep::run_sweep(cfg)?;
    for (value, policy) in &result.skipped {
        eprintln!("{policy} skipped at {} = {value}: instance too large", cfg.sweep_axis.name());
    }
    let name = format!("sweep_{}.csv", cfg.sweep_axis.name());
    sweep::write_rows(create(out, &name)?, &result.rows).map_err(|e| csv_io(&out.join(&name), e))?;
    write_text(out, "config.txt", &cfg.to_canonical())
}

#[allow(clippy::too_many_arguments)]
fn memcap_cmd(
    out: &Path,
    seed: u64,
    family: &str,
    a: f64,
    lo: f64,
    hi: f64,
    ws: (usize, usize),
    trace_len: usize,
    analytic_only: bool,
) -> Result<(), CliError> {
    let spec = match family {
        "point" => WeightDistribution::PointMass(a),
        "binary" => WeightDistribution::SymmetricBinary(a),
        "uniform" => WeightDistribution::Uniform { lo, hi },
        _ => return Err(CliError::Config(format!("unknown family {family:?}; expected point, binary or uniform"))),
    };
    if ws.0 == 0 || ws.0 > ws.1 {
        return Err(CliError::Config(format!("bad W range {}..={}", ws.0, ws.1)));
    }
    let empirical = (!analytic_only).then_some((trace_len, seed));
    let rows = memcap::memcap_table(spec, ws.0..=ws.1, empirical).map_err(|e| CliError::Config(e.to_string()))?;
    let name = "memcap.csv";
    memcap::write_table(create(out, name)?, spec, &rows).map_err(|e| csv_io(&out.join(name), e))
}

fn gen_data(cfg: &ExperimentConfig, out: &Path, slots: Option<usize>, every: Option<usize>) -> Result<(), CliError> {
    let sim = &cfg.sim;
    let slots = slots.unwrap_or(sim.slots);
    let workload = Workload::generate(
        &WorkloadConfig {
            users: sim.users,
            contents: sim.contents,
            zipf_alpha: sim.zipf_alpha,
            archetypes: sim.archetypes,
            slots_per_day: sim.slots_per_day,
            stationary: sim.stationary_demand,
        },
        cfg.seed,
    );
    let schedules = generate_mobility(
        &MobilityConfig {
            users: sim.users,
            radius: sim.radio.cell_radius_m,
            waypoints: sim.waypoints,
            speed: sim.speed,
            period: sim.slots_per_day as f64,
        },
        cfg.seed,
    );
    let content = content_rows(&workload, slots, cfg.seed);
    let mobility = mobility_rows(&schedules, slots + 1, every.unwrap_or(sim.mobility_period));
    traces::write_content(create(out, "content_trace.csv")?, &content)
        .map_err(|e| csv_io(&out.join("content_trace.csv"), e))?;
    traces::write_mobility(create(out, "mobility_trace.csv")?, &mobility)
        .map_err(|e| csv_io(&out.join("mobility_trace.csv"), e))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let mut cfg = load_config(&cli)?;
    let out = cli.out_dir.as_path();
    match &cli.command {
        Command::Simulate { policy, content_trace, mobility_trace } => {
            simulate(&cfg, out, policy.as_deref(), content_trace.as_deref(), mobility_trace.as_deref())
        }
        Command::Sweep { axis, values, repetitions, policy } => {
            run_sweep_cmd(&mut cfg, out, axis.as_deref(), values.as_deref(), *repetitions, policy.as_deref())
        }
        Command::Memcap { family, a, lo, hi, w_min, w_max, trace_len, analytic_only } => {
            memcap_cmd(out, cfg.seed, family, *a, *lo, *hi, (*w_min, *w_max), *trace_len, *analytic_only)
        }
        Command::SampleSize { epsilon, delta } => {
            let e = epsilon.unwrap_or(cfg.sim.epsilon);
            let d = delta.unwrap_or(cfg.sim.delta);
            let n = hoeffding_sample_size(e, d).map_err(|err| CliError::Config(err.to_string()))?;
            println!("{n}");
            Ok(())
        }
        Command::GenData { slots, every } => gen_data(&cfg, out, *slots, *every),
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
