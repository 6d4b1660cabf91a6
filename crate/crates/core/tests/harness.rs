use std::collections::HashSet;

use catswarm::compare::Comparison;
use catswarm::harness::{self, Protocol, ResultSet};
use catswarm::stats;
use catswarm::suite;
use catswarm::Error;

fn small_protocol(algorithms: &[&str], functions: &[&str], runs: usize) -> Protocol {
    Protocol {
        n_runs: runs,
        n_agents: 8,
        max_iters: 20,
        functions: functions.iter().map(|s| s.to_string()).collect(),
        algorithms: algorithms.iter().map(|s| s.to_string()).collect(),
        master_seed: 11,
        dim: Some(6),
    }
}

fn builtins(ids: &[&str]) -> Vec<Box<dyn harness::Optimizer>> {
    ids.iter().map(|id| harness::builtin(id).unwrap()).collect()
}

#[test]
fn seed_grid_is_collision_free() {
    let mut seen = HashSet::new();
    for alg in ["cso", "aicso", "pcso", "random"] {
        for f in suite::IDS {
            for run in 0..30 {
                seen.insert(harness::derive_seed(7, alg, f, run));
            }
        }
    }
    assert_eq!(seen.len(), 4 * 23 * 30);
}

#[test]
fn canonical_order_and_shape() {
    let algos = ["cso", "aicso", "pcso", "random"];
    let p = small_protocol(&algos, &["F1", "F15", "F8"], 3);
    let set = harness::run_suite(&p, &builtins(&algos), 4).unwrap();
    assert_eq!(set.trials.len(), 4 * 3 * 3);
    let mut expected = Vec::new();
    for a in &algos {
        for f in ["F1", "F15", "F8"] {
            for r in 0..3 {
                expected.push((a.to_string(), f.to_string(), r));
            }
        }
    }
    let got: Vec<_> = set
        .trials
        .iter()
        .map(|t| (t.algorithm.clone(), t.function.clone(), t.run_index))
        .collect();
    assert_eq!(got, expected);
    for t in &set.trials {
        assert!(t.failure.is_none());
        assert!(t.trace.windows(2).all(|w| w[1].best_fitness <= w[0].best_fitness));
        assert_eq!(t.trace.last().unwrap().best_fitness, t.best_fitness);
        assert_eq!(t.seed, harness::derive_seed(11, &t.algorithm, &t.function, t.run_index));
        let entry = p.objective(&t.function).unwrap();
        assert_eq!(t.best_position.len(), catswarm::Objective::dim(&entry));
    }
    // Random search trace covers iterations 1..=max_iters, swarms start at 0.
    let random = set.trials.iter().find(|t| t.algorithm == "random").unwrap();
    assert_eq!(random.trace.first().unwrap().iteration, 1);
    assert_eq!(random.trace.len(), 20);
    assert_eq!(random.evaluations_used, 8 * 20);
    let swarm = set.trials.iter().find(|t| t.algorithm == "cso").unwrap();
    assert_eq!(swarm.trace.first().unwrap().iteration, 0);
    assert_eq!(swarm.trace.len(), 21);
}

#[test]
fn worker_count_does_not_change_output() {
    let algos = ["cso", "pcso", "random"];
    let p = small_protocol(&algos, &["F1", "F7", "F9", "F21"], 4);
    let one = harness::render_results(&harness::run_suite(&p, &builtins(&algos), 1).unwrap());
    let many = harness::render_results(&harness::run_suite(&p, &builtins(&algos), 8).unwrap());
    assert_eq!(one, many);
}

#[test]
fn results_round_trip_through_files() {
    let algos = ["cso", "random"];
    let p = small_protocol(&algos, &["F1", "F16"], 5);
    let set = harness::run_suite(&p, &builtins(&algos), 2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.csv");
    harness::write_results(&set, &path).unwrap();
    assert!(dir.path().join("results.trace.csv").exists());
    let back = harness::load_results(&path).unwrap();
    assert_eq!(back, set);
    assert_eq!(back.meta("n_runs"), Some("5"));
    assert_eq!(back.meta("param.cso.smp"), Some("5"));

    let text = std::fs::read_to_string(&path).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "algorithm,function,run_index,seed,best_fitness,evaluations_used,best_position");
    let trace = std::fs::read_to_string(dir.path().join("results.trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "algorithm,function,run_index,iteration,best_fitness");

    assert_eq!(
        Comparison::from_results(&back, Some("cso")).unwrap(),
        Comparison::from_results(&set, Some("cso")).unwrap()
    );
}

#[test]
fn truncated_file_names_the_record() {
    let p = small_protocol(&["cso"], &["F1"], 4);
    let set = harness::run_suite(&p, &builtins(&["cso"]), 1).unwrap();
    let (main, _) = harness::render_results(&set);
    let cut = &main[..main.len() - 40];
    match harness::parse_results(cut, "cut.csv") {
        Err(Error::Parse { record, path, .. }) => {
            assert_eq!(record, 3);
            assert_eq!(path, "cut.csv");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn foreign_suite_version_loads_with_warning() {
    let p = small_protocol(&["cso"], &["F1"], 2);
    let set = harness::run_suite(&p, &builtins(&["cso"]), 1).unwrap();
    let (main, _) = harness::render_results(&set);
    let old = main.replace(suite::SUITE_VERSION, "classical-23/0");
    let loaded: ResultSet = harness::parse_results(&old, "old.csv").unwrap();
    assert_eq!(loaded.trials.len(), 2);
    assert!(loaded.warnings.iter().any(|w| w.contains("classical-23/0")));
    let cmp = Comparison::from_results(&loaded, None).unwrap();
    assert!(cmp.warnings.iter().any(|w| w.contains("classical-23/0")));
}

#[test]
fn evaluations_stay_within_documented_bound() {
    let algos = ["cso", "aicso", "pcso"];
    let p = small_protocol(&algos, &["F5", "F19"], 2);
    let set = harness::run_suite(&p, &builtins(&algos), 2).unwrap();
    let params = catswarm::cso::CsoParams {
        n_cats: p.n_agents,
        max_iters: p.max_iters,
        ..Default::default()
    };
    for t in &set.trials {
        assert!(t.evaluations_used <= params.evaluation_bound(), "{t:?}");
    }
}

#[test]
fn random_splits_of_one_sample_rarely_reject() {
    // 60 draws from one recorded CSO distribution, split into two 30-run
    // halves 100 times.
    let p = Protocol {
        n_runs: 60,
        n_agents: 10,
        max_iters: 30,
        functions: vec!["F9".into()],
        algorithms: vec!["cso".into()],
        master_seed: 3,
        dim: Some(5),
    };
    let set = harness::run_suite(&p, &builtins(&["cso"]), 4).unwrap();
    let values: Vec<f64> = set.trials.iter().map(|t| t.best_fitness).collect();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(99);
    let mut above = 0;
    for _ in 0..100 {
        let mut v = values.clone();
        rand::seq::SliceRandom::shuffle(v.as_mut_slice(), &mut rng);
        let r = stats::wilcoxon_signed_rank(&v[..30], &v[30..]).unwrap();
        if r.p_value > 0.05 {
            above += 1;
        }
    }
    assert!(above >= 85, "only {above}/100 splits had p > 0.05");
}
