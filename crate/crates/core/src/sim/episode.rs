use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::seq::index;

use super::geometry::{distance, nearest, Grid, Point, MIN_DISTANCE_M};
use super::oracle::{exhaustive_placement, PathValues};
use super::{EpisodeReport, PolicyKind, PredictionSource, SimConfig, SimError, SlotMetrics};
use crate::cache::{
    cluster_rrhs, estimate_popularity, select_cloud_cache, select_rrh_cache, update_distribution, CacheState,
    ClusterSet, PopularitySample, SamplingPlan, UserDemand,
};
use crate::data::{
    generate_mobility, ContentTraceRow, MobilityConfig, MobilityTraceRow, Trajectory, Workload, WorkloadConfig,
};
use crate::esn::{
    forecasting_window, ContentDistribution, ContentEsn, ContentEsnConfig, ContextVector, MobilityEsn,
    WeightDistribution, CONTEXT_WIDTH,
};
use crate::qos::{effective_capacity, long_term_average, path_exponent, per_content_rate, Path, WiredParams};
use crate::rng::{derive_seed, hashed_exponential, stream, Purpose};

/// Requests replayed from a content trace, keyed by `(slot, user)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentReplay {
    requests: BTreeMap<(usize, usize), (ContextVector, usize)>,
}

impl ContentReplay {
    pub fn from_rows(rows: &[ContentTraceRow], users: usize, contents: usize) -> Result<Self, SimError> {
        let mut requests = BTreeMap::new();
        for (i, row) in rows.iter().enumerate() {
            row.validate(Some(contents))
                .map_err(|m| SimError::Trace(format!("row {}: {m}", i + 1)))?;
            if row.user_id >= users {
                return Err(SimError::Trace(format!("row {}: user_id {} but U = {users}", i + 1, row.user_id)));
            }
            let ctx = ContextVector::new(row.context.to_vec()).map_err(|e| SimError::Trace(format!("{e}")))?;
            if requests.insert((row.slot, row.user_id), (ctx, row.content_id - 1)).is_some() {
                return Err(SimError::Trace(format!(
                    "row {}: user {} requests twice in slot {}",
                    i + 1,
                    row.user_id,
                    row.slot
                )));
            }
        }
        Ok(Self { requests })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Demand {
    Synthetic(Workload),
    Replay(ContentReplay),
}

/// Everything an episode needs besides the policy: demand and trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub demand: Demand,
    pub trajectories: Vec<Trajectory>,
}

struct Truth {
    context: ContextVector,
    distribution: Vec<f64>,
    request: usize,
}

fn workload_config(cfg: &SimConfig) -> WorkloadConfig {
    WorkloadConfig {
        users: cfg.users,
        contents: cfg.contents,
        zipf_alpha: cfg.zipf_alpha,
        archetypes: cfg.archetypes,
        slots_per_day: cfg.slots_per_day,
        stationary: cfg.stationary_demand,
    }
}

fn synthetic_trajectories(cfg: &SimConfig, seed: u64) -> Vec<Trajectory> {
    let mc = MobilityConfig {
        users: cfg.users,
        radius: cfg.radio.cell_radius_m,
        waypoints: cfg.waypoints,
        speed: cfg.speed,
        period: cfg.slots_per_day as f64,
    };
    generate_mobility(&mc, seed).into_iter().map(Trajectory::Loop).collect()
}

impl Scenario {
    pub fn synthetic(cfg: &SimConfig, seed: u64) -> Self {
        Self {
            demand: Demand::Synthetic(Workload::generate(&workload_config(cfg), seed)),
            trajectories: synthetic_trajectories(cfg, seed),
        }
    }

    /// Replace the synthetic demand and/or trajectories with trace data.
    pub fn with_traces(
        cfg: &SimConfig,
        seed: u64,
        content: Option<&[ContentTraceRow]>,
        mobility: Option<&[MobilityTraceRow]>,
    ) -> Result<Self, SimError> {
        let mut scenario = Self::synthetic(cfg, seed);
        if let Some(rows) = content {
            scenario.demand = Demand::Replay(ContentReplay::from_rows(rows, cfg.users, cfg.contents)?);
        }
        if let Some(rows) = mobility {
            let mut tracks: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); cfg.users];
            for (i, row) in rows.iter().enumerate() {
                row.validate(cfg.radio.cell_radius_m)
                    .map_err(|m| SimError::Trace(format!("row {}: {m}", i + 1)))?;
                if row.user_id >= cfg.users {
                    return Err(SimError::Trace(format!("row {}: user_id {} but U = {}", i + 1, row.user_id, cfg.users)));
                }
                tracks[row.user_id].push((row.t, row.x_m, row.y_m));
            }
            for (u, track) in tracks.into_iter().enumerate() {
                if track.is_empty() {
                    return Err(SimError::Trace(format!("user {u} has no mobility samples")));
                }
                let mut track = track;
                track.sort_by(|a, b| a.0.total_cmp(&b.0));
                scenario.trajectories[u] = Trajectory::Track(track);
            }
        }
        Ok(scenario)
    }

    fn truth(&self, user: usize, slot: usize, seed: u64, contents: usize) -> Option<Truth> {
        match &self.demand {
            Demand::Synthetic(w) => Some(Truth {
                context: w.context(user, slot),
                distribution: w.distribution(user, slot).to_vec(),
                request: w.request(user, slot, seed),
            }),
            Demand::Replay(r) => r.requests.get(&(slot, user)).map(|(ctx, n)| {
                let mut distribution = vec![0.0; contents];
                distribution[*n] = 1.0;
                Truth { context: ctx.clone(), distribution, request: *n }
            }),
        }
    }
}

/// Per-user mobility forecaster state.
struct Tracker {
    esn: MobilityEsn,
    inputs: Vec<f64>,
    states: Vec<DVector<f64>>,
    last_code: usize,
    last_slot: usize,
    forecast: Option<Point>,
}

impl Tracker {
    fn observe(&mut self, code: usize, slot: usize, grid: &Grid) {
        let m = code as f64 / grid.cells() as f64;
        let s = self.esn.update_state(m).clone();
        self.inputs.push(m);
        self.states.push(s);
        self.last_code = code;
        self.last_slot = slot;
        self.refresh(grid);
    }

    fn retrain(&mut self, horizon: usize, max_columns: usize, grid: &Grid) {
        let n = self.states.len();
        if n == 0 {
            return;
        }
        let mut mat = DMatrix::zeros(self.esn.units(), n);
        for (c, s) in self.states.iter().enumerate() {
            mat.set_column(c, s);
        }
        if let Some(window) = forecasting_window(&mat, &self.inputs, horizon, max_columns) {
            // a rank-deficient window keeps the previous readout
            let _ = self.esn.train(&window);
        }
        self.refresh(grid);
    }

    fn refresh(&mut self, grid: &Grid) {
        if self.esn.is_trained() {
            let next = self.esn.predict()[0] * grid.cells() as f64;
            let code = libm::round(next).clamp(0.0, (grid.cells() - 1) as f64) as usize;
            self.forecast = Some(grid.center(code));
        }
    }

    fn predicted_position(&self, slot: usize, period: usize, grid: &Grid) -> Point {
        let from = grid.center(self.last_code);
        match self.forecast {
            Some(to) => {
                let f = (slot - self.last_slot) as f64 / period as f64;
                (from.0 + (to.0 - from.0) * f, from.1 + (to.1 - from.1) * f)
            }
            None => from,
        }
    }
}

fn path_values(samples: &[f64], tau: f64, theta_o: f64, wired: &WiredParams, rates: (f64, f64)) -> PathValues {
    let e = |path: Path| match path_exponent(path, theta_o, wired, rates.0, rates.1) {
        Ok(theta) => effective_capacity(theta, samples, tau),
        Err(_) => 0.0,
    };
    PathValues { o: e(Path::O), a: e(Path::A), g: e(Path::G), s: e(Path::S) }
}

struct Radio {
    p_w: f64,
    noise_w: f64,
    beta: f64,
    bandwidth_mhz: f64,
}

impl Radio {
    fn power(&self, d: f64, fading: f64) -> f64 {
        self.p_w * libm::pow(d.max(MIN_DISTANCE_M), -self.beta) * fading
    }
}

/// Cumulative service in Mbit over one slot for each of `n_mc` draws of the
/// fading along the user's path.
#[allow(clippy::too_many_arguments)]
fn capacity_samples(
    cfg: &SimConfig,
    radio: &Radio,
    seed: u64,
    k: usize,
    user: usize,
    trajectory: &Trajectory,
    rrhs: &[Point],
    serving: usize,
    interferers: &[usize],
) -> Vec<f64> {
    let positions: Vec<Point> = (0..cfg.substeps)
        .map(|s| trajectory.position_at((k - 1) as f64 + (s as f64 + 0.5) / cfg.substeps as f64))
        .collect();
    (0..cfg.n_mc)
        .map(|d| {
            let mut total = 0.0;
            for (s, &pos) in positions.iter().enumerate() {
                let key = |r: usize| [k as u64, user as u64, d as u64, s as u64, r as u64];
                let fade = |r: usize| hashed_exponential(seed, Purpose::Fading, &key(r));
                let signal = radio.power(distance(pos, rrhs[serving]), fade(serving));
                let interference: f64 = interferers
                    .iter()
                    .map(|&j| radio.power(distance(pos, rrhs[j]), fade(j)))
                    .sum();
                let gamma = signal / (interference + radio.noise_w);
                total += radio.bandwidth_mhz * libm::log2(1.0 + gamma);
            }
            total
        })
        .collect()
}

fn random_set(seed: u64, indices: &[u64], catalog: usize, size: usize) -> Vec<usize> {
    let mut rng = stream(seed, Purpose::RandomCache, indices);
    let mut v = index::sample(&mut rng, catalog, size).into_vec();
    v.sort_unstable();
    v
}

/// Run a synthetic episode.
pub fn run_episode(cfg: &SimConfig, policy: PolicyKind, seed: u64) -> Result<EpisodeReport, SimError> {
    cfg.validate()?;
    run_scenario(cfg, &Scenario::synthetic(cfg, seed), policy, seed)
}

struct UserSlot {
    truth: Truth,
    prediction: Vec<f64>,
    predicted_rrh: usize,
    serving: usize,
    values: PathValues,
    samples: Vec<f64>,
}

pub fn run_scenario(cfg: &SimConfig, scenario: &Scenario, policy: PolicyKind, seed: u64) -> Result<EpisodeReport, SimError> {
    cfg.validate()?;
    if scenario.trajectories.len() != cfg.users {
        return Err(SimError::Config(format!(
            "scenario has {} trajectories but U = {}",
            scenario.trajectories.len(),
            cfg.users
        )));
    }
    let (u_count, n_count) = (cfg.users, cfg.contents);
    let radio = Radio {
        p_w: cfg.radio.tx_power_w(),
        noise_w: cfg.radio.noise_w(),
        beta: cfg.radio.pathloss_exponent,
        bandwidth_mhz: cfg.radio.bandwidth_hz / 1e6,
    };
    let tau = cfg.substeps as f64;
    let grid = Grid::new(cfg.radio.cell_radius_m, cfg.grid_pitch);
    let plan = SamplingPlan::new(cfg.epsilon, cfg.delta)?;

    let mut topo = stream(seed, Purpose::Topology, &[]);
    let rrhs: Vec<Point> = (0..cfg.rrhs)
        .map(|_| crate::data::disk_point(&mut topo, (0.0, 0.0), cfg.radio.cell_radius_m))
        .collect();

    let use_esn = cfg.prediction == PredictionSource::Esn;
    let mut content_esns: Vec<ContentEsn> = Vec::new();
    let mut trackers: Vec<Tracker> = Vec::new();
    if use_esn {
        let ecfg = ContentEsnConfig {
            reservoir_units: cfg.reservoir_units,
            context_width: CONTEXT_WIDTH,
            contents: n_count,
            learning_rate: cfg.content_lr,
            spectral_radius: cfg.spectral_radius,
            density: cfg.reservoir_density,
            input_scaling: cfg.input_scaling,
            output_init: cfg.output_init,
        };
        for u in 0..u_count {
            let mut rng = stream(seed, Purpose::ContentEsn, &[u as u64]);
            content_esns.push(ContentEsn::random(&ecfg, &mut rng)?);
            let esn = MobilityEsn::new(
                cfg.mobility_units,
                WeightDistribution::PointMass(cfg.cycle_weight),
                cfg.horizon,
                cfg.ridge_lambda,
                derive_seed(seed, Purpose::MobilityEsn, &[u as u64]),
            )?;
            let code = grid.code(scenario.trajectories[u].position_at(0.0));
            trackers.push(Tracker { esn, inputs: Vec::new(), states: Vec::new(), last_code: code, last_slot: 1, forecast: None });
        }
    }

    let mut caches = CacheState::new(n_count, cfg.rrhs, cfg.cloud_capacity, cfg.rrh_capacity);
    let mut rates = (cfg.wired.backhaul_rate, cfg.wired.fronthaul_rate);
    let mut period_stream: Vec<PopularitySample> = Vec::new();
    let mut previous_stream: Vec<PopularitySample> = Vec::new();
    let mut slots = Vec::with_capacity(cfg.slots);
    let mut cloud_trace = Vec::new();

    for k in 1..=cfg.slots {
        let t0 = (k - 1) as f64;
        let period_start = (k - 1) % cfg.cloud_period == 0;
        if use_esn {
            for (u, tr) in trackers.iter_mut().enumerate() {
                if (k - 1) % cfg.mobility_period == 0 {
                    tr.observe(grid.code(scenario.trajectories[u].position_at(t0)), k, &grid);
                }
                if period_start {
                    tr.retrain(cfg.horizon, cfg.training_len, &grid);
                }
            }
        }

        // forecasts and ground truth for every user requesting this slot
        let mut users: Vec<(usize, UserSlot)> = Vec::new();
        let mut demand_error = 0.0;
        for u in 0..u_count {
            let Some(truth) = scenario.truth(u, k, seed, n_count) else {
                continue;
            };
            let true_pos = scenario.trajectories[u].position_at(t0);
            let serving = nearest(&rrhs, true_pos);
            let (prediction, predicted_rrh) = if use_esn {
                content_esns[u].update_state(&truth.context)?;
                let p = content_esns[u].predict(&truth.context)?.into_inner();
                let pos = trackers[u].predicted_position(k, cfg.mobility_period, &grid);
                (p, nearest(&rrhs, pos))
            } else {
                (truth.distribution.clone(), serving)
            };
            demand_error += prediction.iter().zip(&truth.distribution).map(|(a, b)| (a - b).abs()).sum::<f64>();
            users.push((
                u,
                UserSlot {
                    truth,
                    prediction,
                    predicted_rrh,
                    serving,
                    values: PathValues { o: 0.0, a: 0.0, g: 0.0, s: 0.0 },
                    samples: Vec::new(),
                },
            ));
        }
        if !users.is_empty() {
            demand_error /= users.len() as f64;
        }

        let clusters = match policy {
            PolicyKind::RandomWithoutClustering => ClusterSet::singletons(cfg.rrhs, cfg.chi),
            PolicyKind::OptimalOracle => {
                let d: Vec<UserDemand> = users
                    .iter()
                    .map(|(_, s)| UserDemand { rrh: s.serving, probs: &s.truth.distribution })
                    .collect();
                cluster_rrhs(&d, cfg.rrhs, cfg.chi)?
            }
            // clusters are formed at delivery time, when associations are known
            _ => {
                let d: Vec<UserDemand> = users
                    .iter()
                    .map(|(_, s)| UserDemand { rrh: s.serving, probs: &s.prediction })
                    .collect();
                cluster_rrhs(&d, cfg.rrhs, cfg.chi)?
            }
        };

        // channel: interference from active RRHs outside the serving cluster
        let mut active = vec![false; cfg.rrhs];
        for (_, s) in &users {
            active[s.serving] = true;
        }
        let mut masks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (u, s) in users.iter_mut() {
            let interferers = masks.entry(s.serving).or_insert_with(|| {
                let near = clusters.neighbour_mask(s.serving, cfg.rrhs);
                (0..cfg.rrhs).filter(|&j| active[j] && !near[j]).collect()
            });
            s.samples = capacity_samples(cfg, &radio, seed, k, *u, &scenario.trajectories[*u], &rrhs, s.serving, interferers);
            s.values = path_values(&s.samples, tau, cfg.theta_o, &cfg.wired, rates);
        }

        // placement
        match policy {
            PolicyKind::Proposed => {
                let mut per_rrh: Vec<Vec<usize>> = vec![Vec::new(); cfg.rrhs];
                for (i, (_, s)) in users.iter().enumerate() {
                    per_rrh[s.predicted_rrh].push(i);
                }
                for (r, members) in per_rrh.iter().enumerate() {
                    let demands: Vec<(&[f64], f64)> = members
                        .iter()
                        .map(|&i| (users[i].1.prediction.as_slice(), users[i].1.values.o))
                        .collect();
                    caches.set_rrh(r, &select_rrh_cache(&demands, n_count, cfg.rrh_capacity)?)?;
                }
                for (_, s) in &users {
                    period_stream.push(PopularitySample {
                        slot: k,
                        values: update_distribution(&s.prediction, caches.rrh(s.predicted_rrh)),
                        weight: s.values.a,
                    });
                }
                if period_start {
                    let source = if k == 1 { &period_stream } else { &previous_stream };
                    let mut rng = stream(seed, Purpose::Sampling, &[k as u64]);
                    let est = estimate_popularity(source, n_count, &plan, &mut rng)?;
                    caches.set_cloud(&select_cloud_cache(&est.values, cfg.cloud_capacity)?)?;
                }
            }
            PolicyKind::RandomWithClustering | PolicyKind::RandomWithoutClustering => {
                for r in 0..cfg.rrhs {
                    caches.set_rrh(r, &random_set(seed, &[k as u64, r as u64], n_count, cfg.rrh_capacity))?;
                }
                if period_start {
                    caches.set_cloud(&random_set(seed, &[k as u64, u64::MAX], n_count, cfg.cloud_capacity))?;
                }
            }
            PolicyKind::OptimalOracle => {
                let probs: Vec<Vec<f64>> = users.iter().map(|(_, s)| s.truth.distribution.clone()).collect();
                let serving: Vec<usize> = users.iter().map(|(_, s)| s.serving).collect();
                let values: Vec<PathValues> = users.iter().map(|(_, s)| s.values).collect();
                let fixed = caches.cloud().to_vec();
                let placement = exhaustive_placement(
                    &probs,
                    &serving,
                    &values,
                    cfg.rrhs,
                    cfg.cloud_capacity,
                    cfg.rrh_capacity,
                    if period_start { None } else { Some(&fixed) },
                    cfg.oracle_limit,
                )?;
                for (r, set) in placement.rrhs.iter().enumerate() {
                    caches.set_rrh(r, set)?;
                }
                caches.set_cloud(&placement.cloud)?;
            }
        }
        if period_start {
            cloud_trace.push((k, caches.cloud().to_vec()));
        }

        // delivery
        let mut m = SlotMetrics {
            k,
            e_k: 0.0,
            requests: users.len(),
            hits_o: 0,
            hits_a: 0,
            hits_g: 0,
            misses_s: 0,
            n_b: 0,
            n_f: 0,
            infeasible: 0,
            demand_error,
        };
        let paths: Vec<Path> = users
            .iter()
            .map(|(_, s)| {
                let n = s.truth.request;
                if caches.in_rrh(s.serving, n) {
                    Path::O
                } else if caches.in_cloud(n) {
                    Path::A
                } else if caches.in_remote_rrh(s.serving, n) {
                    Path::G
                } else {
                    Path::S
                }
            })
            .collect();
        for p in &paths {
            match p {
                Path::O => m.hits_o += 1,
                Path::A => m.hits_a += 1,
                Path::G => m.hits_g += 1,
                Path::S => m.misses_s += 1,
            }
        }
        m.n_b = m.misses_s;
        m.n_f = m.misses_s + m.hits_a + m.hits_g;
        let v_bu = per_content_rate(cfg.wired.backhaul_rate, m.n_b);
        let v_fu = per_content_rate(cfg.wired.fronthaul_rate, m.n_f);
        for ((_, s), &p) in users.iter().zip(&paths) {
            match path_exponent(p, cfg.theta_o, &cfg.wired, v_bu, v_fu) {
                Ok(theta) => m.e_k += effective_capacity(theta, &s.samples, tau),
                Err(_) => m.infeasible += 1,
            }
        }
        rates = (v_bu, v_fu);

        if use_esn {
            for (u, s) in &users {
                let observed = ContentDistribution::new(s.truth.distribution.clone())?;
                content_esns[*u].train_step(&s.truth.context, &observed)?;
            }
        }
        if k % cfg.cloud_period == 0 {
            previous_stream = core::mem::take(&mut period_stream);
        }
        slots.push(m);
    }

    let series: Vec<f64> = slots.iter().map(|m: &SlotMetrics| m.e_k).collect();
    Ok(EpisodeReport {
        policy,
        seed,
        mean_e: long_term_average(&series),
        slots,
        cloud_trace,
    })
}

