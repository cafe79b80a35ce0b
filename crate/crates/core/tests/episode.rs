use esncache_core::data::{content_rows, Workload, WorkloadConfig};
use esncache_core::rng::{stream, Purpose};
use esncache_core::sim::{
    exhaustive_placement, expected_objective, greedy_placement, run_episode, run_scenario, PathValues, Placement,
    PredictionSource, Scenario,
};
use esncache_core::{PolicyKind, SimConfig, SimError};
use rand::seq::index;
use rand::Rng;

fn small() -> SimConfig {
    SimConfig {
        rrhs: 6,
        users: 10,
        contents: 12,
        cloud_capacity: 2,
        rrh_capacity: 2,
        reservoir_units: 20,
        slots: 12,
        cloud_period: 6,
        n_mc: 8,
        substeps: 4,
        ..SimConfig::default()
    }
}

#[test]
fn episodes_are_reproducible() {
    let cfg = small();
    for policy in [PolicyKind::Proposed, PolicyKind::RandomWithClustering] {
        let a = run_episode(&cfg, policy, 5).unwrap();
        let b = run_episode(&cfg, policy, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.slots.len(), cfg.slots);
    }
    assert_ne!(
        run_episode(&cfg, PolicyKind::Proposed, 5).unwrap(),
        run_episode(&cfg, PolicyKind::Proposed, 6).unwrap()
    );
}

#[test]
fn path_accounting_holds_every_slot() {
    let cfg = small();
    for policy in [PolicyKind::Proposed, PolicyKind::RandomWithClustering, PolicyKind::RandomWithoutClustering] {
        let report = run_episode(&cfg, policy, 2).unwrap();
        for m in &report.slots {
            assert_eq!(m.hits_o + m.hits_a + m.hits_g + m.misses_s, m.requests);
            assert_eq!(m.n_b, m.misses_s);
            assert_eq!(m.n_f, m.misses_s + m.hits_a + m.hits_g);
            assert!(m.e_k >= 0.0);
        }
        let mean = report.slots.iter().map(|m| m.e_k).sum::<f64>() / cfg.slots as f64;
        assert!((report.mean_e - mean).abs() < 1e-9);
    }
}

#[test]
fn without_caches_everything_comes_from_the_server() {
    let cfg = SimConfig { cloud_capacity: 0, rrh_capacity: 0, ..small() };
    let report = run_episode(&cfg, PolicyKind::Proposed, 1).unwrap();
    for m in &report.slots {
        assert_eq!(m.requests, cfg.users);
        assert_eq!(m.misses_s, cfg.users);
        assert_eq!((m.n_b, m.n_f), (cfg.users, cfg.users));
    }
}

#[test]
fn full_local_caches_serve_everything_locally() {
    let cfg = SimConfig { rrh_capacity: 12, prediction: PredictionSource::Truth, ..small() };
    let report = run_episode(&cfg, PolicyKind::Proposed, 1).unwrap();
    for m in &report.slots {
        assert_eq!(m.hits_o, m.requests);
        assert_eq!((m.n_b, m.n_f), (0, 0));
        assert_eq!(m.infeasible, 0);
    }
}

#[test]
fn clustering_only_removes_interference() {
    let cfg = small();
    let with = run_episode(&cfg, PolicyKind::RandomWithClustering, 3).unwrap();
    let without = run_episode(&cfg, PolicyKind::RandomWithoutClustering, 3).unwrap();
    for (a, b) in with.slots.iter().zip(&without.slots) {
        assert_eq!((a.hits_o, a.hits_a, a.hits_g, a.misses_s), (b.hits_o, b.hits_a, b.hits_g, b.misses_s));
        assert!(b.e_k <= a.e_k + 1e-9);
    }
    assert_eq!(with.cloud_trace, without.cloud_trace);
}

#[test]
fn cloud_updates_follow_the_period() {
    let cfg = small();
    let report = run_episode(&cfg, PolicyKind::Proposed, 4).unwrap();
    let slots: Vec<usize> = report.cloud_trace.iter().map(|(k, _)| *k).collect();
    assert_eq!(slots, vec![1, 7]);
    assert!(report.cloud_trace.iter().all(|(_, c)| c.len() == cfg.cloud_capacity));
}

#[test]
fn invalid_configs_are_rejected() {
    let cfg = SimConfig { cloud_period: 5, ..small() };
    assert!(matches!(run_episode(&cfg, PolicyKind::Proposed, 1), Err(SimError::Config(_))));
    let cfg = SimConfig { rrh_capacity: 13, ..small() };
    assert!(matches!(run_episode(&cfg, PolicyKind::Proposed, 1), Err(SimError::Config(_))));
}

#[test]
fn oracle_refuses_large_instances() {
    let cfg = SimConfig { rrhs: 20, ..small() };
    assert!(matches!(
        run_episode(&cfg, PolicyKind::OptimalOracle, 1),
        Err(SimError::OracleTooLarge { .. })
    ));
}

#[test]
fn oracle_runs_on_tiny_instances() {
    let cfg = SimConfig {
        rrhs: 3,
        users: 4,
        contents: 6,
        cloud_capacity: 2,
        rrh_capacity: 1,
        prediction: PredictionSource::Truth,
        ..small()
    };
    let report = run_episode(&cfg, PolicyKind::OptimalOracle, 1).unwrap();
    assert!(report.mean_e > 0.0);
}

fn random_values<R: Rng>(rng: &mut R) -> PathValues {
    let s = rng.random_range(0.5..5.0);
    let g = s + rng.random_range(0.0..2.0);
    let a = g + rng.random_range(0.0..2.0);
    PathValues { o: a + rng.random_range(0.0..2.0), a, g, s }
}

#[test]
fn exhaustive_placement_dominates_other_placements() {
    for seed in 0..100 {
        let mut rng = stream(seed, Purpose::Workload, &[]);
        let (n, r, u) = (6, 3, 4);
        let probs: Vec<Vec<f64>> = (0..u)
            .map(|_| {
                let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                let t: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / t).collect()
            })
            .collect();
        let serving: Vec<usize> = (0..u).map(|_| rng.random_range(0..r)).collect();
        let values: Vec<PathValues> = (0..u).map(|_| random_values(&mut rng)).collect();
        let best = exhaustive_placement(&probs, &serving, &values, r, 2, 1, None, 1e6).unwrap();
        let top = expected_objective(&probs, &serving, &values, &best);
        let greedy = greedy_placement(&probs, &serving, &values, r, 2, 1, None).unwrap();
        assert!(top >= expected_objective(&probs, &serving, &values, &greedy) - 1e-12);
        let mut pick = |k: usize| {
            let mut v = index::sample(&mut rng, n, k).into_vec();
            v.sort_unstable();
            v
        };
        let random = Placement { cloud: pick(2), rrhs: (0..r).map(|_| pick(1)).collect() };
        assert!(top >= expected_objective(&probs, &serving, &values, &random) - 1e-12);
    }
}

#[test]
fn replayed_requests_drive_the_episode() {
    let cfg = small();
    let workload = Workload::generate(
        &WorkloadConfig {
            users: cfg.users,
            contents: cfg.contents,
            zipf_alpha: cfg.zipf_alpha,
            archetypes: cfg.archetypes,
            slots_per_day: cfg.slots_per_day,
            stationary: false,
        },
        8,
    );
    let mut rows = content_rows(&workload, cfg.slots, 8);
    // user 0 goes silent
    rows.retain(|r| r.user_id != 0);
    let scenario = Scenario::with_traces(&cfg, 8, Some(&rows), None).unwrap();
    let report = run_scenario(&cfg, &scenario, PolicyKind::Proposed, 8).unwrap();
    assert!(report.slots.iter().all(|m| m.requests == cfg.users - 1));

    rows[0].content_id = cfg.contents + 1;
    assert!(matches!(Scenario::with_traces(&cfg, 8, Some(&rows), None), Err(SimError::Trace(_))));
}
