use pcnls::harness::{self, corpus, parse_manifest, Command, CorpusKind, DataSpec, GridSpec, Manifest};
use proptest::prelude::*;

const SMALL: &str = r#"
seed = 11
dt = 1e-2

[grid]
radius = 16.0
intervals = 256

[conserve]
t_end = 0.2
reference_refinement = 4

[highlow]
t_final = 1.0
dt = 1e-2
stride = 10
grid = { radius = 16.0, intervals = 256 }

[lwp]
panels = 20
solver_dt = 1e-3

[norms]
corpora = 3
time_samples = 17
"#;

fn small() -> Manifest {
    parse_manifest(SMALL).unwrap()
}

#[test]
fn every_scenario_runs_on_a_small_grid() {
    let m = small();
    for outcome in harness::run_many(&Command::ALL, &m) {
        let outcome = outcome.unwrap();
        assert!(!outcome.checks.is_empty(), "{}", outcome.command);
        let mut names: Vec<&str> = outcome.checks.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), outcome.checks.len(), "duplicate check names in {}", outcome.command);
        assert_eq!(outcome.lines().len(), outcome.checks.len());
    }
}

#[test]
fn exact_checks_hold_on_a_small_grid() {
    let m = small();
    let oracle = harness::run(Command::Oracle, &m).unwrap();
    assert!(oracle.passed(), "{:?}", oracle.lines());
    let norms = harness::run(Command::Norms, &m).unwrap();
    for name in ["criticality_s_c", "criticality_gamma", "lp_reconstruction", "weighted_half_finite"] {
        assert!(norms.check(name).unwrap().passed, "{name}");
    }
}

#[test]
fn artifacts_are_reproducible() {
    let m = small();
    let cmds = [Command::Conserve, Command::Norms, Command::Highlow];
    let a = harness::run_many(&cmds, &m);
    let b = harness::run_many(&cmds, &m);
    for (a, b) in a.into_iter().zip(b) {
        let (a, b) = (a.unwrap(), b.unwrap());
        assert_eq!(a.checks, b.checks);
        let bytes = |o: &harness::ScenarioOutcome| {
            o.artifacts
                .iter()
                .map(|x| (x.file_name.clone(), x.contents.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(bytes(&a), bytes(&b));
    }
}

#[test]
fn zero_data_passes_conservation() {
    let m = Manifest {
        data: DataSpec::Zero,
        ..small()
    };
    let outcome = harness::run(Command::Conserve, &m).unwrap();
    assert!(outcome.passed(), "{:?}", outcome.lines());
    assert!(outcome.check("splitting_order").unwrap().detail.contains("exact"));
}

#[test]
fn artifacts_land_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let outcome = harness::run(Command::Oracle, &small()).unwrap();
    outcome.write_artifacts(dir.path()).unwrap();
    let checks: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("oracle_checks.json")).unwrap()).unwrap();
    assert_eq!(checks.as_array().unwrap().len(), outcome.checks.len());
    assert!(dir.path().join("oracle.json").exists());
}

#[test]
fn default_manifest_round_trips_through_toml() {
    let m = Manifest::default();
    let text = toml::to_string(&m).unwrap();
    assert_eq!(parse_manifest(&text).unwrap(), m);
}

#[test]
fn corpus_rotation_covers_every_kind() {
    let grid = GridSpec {
        radius: 16.0,
        intervals: 256,
    }
    .build()
    .unwrap();
    let kinds: Vec<CorpusKind> = (0..9).map(CorpusKind::rotation).collect();
    for k in [CorpusKind::GaussianMix, CorpusKind::RandomBandlimited] {
        assert!(kinds.contains(&k));
    }
    for j in -1..=1 {
        assert!(kinds.contains(&CorpusKind::ShellBump { j }));
    }
    for (i, &k) in kinds.iter().enumerate() {
        let f = corpus(grid, i as u64, k);
        assert!(f.values().iter().all(|v| v.is_finite()));
        assert!(f.values().iter().any(|v| v.norm() > 0.0));
    }
}

proptest! {
    #[test]
    fn grid_flag_round_trips(log_m in 6u32..14, radius in 1.0f64..256.0) {
        let m = 1usize << log_m;
        let grid = GridSpec::parse_mxr(&format!("{m}x{radius}")).unwrap();
        prop_assert_eq!(grid.intervals, m);
        prop_assert_eq!(grid.radius, radius);
        prop_assert!(grid.build().is_ok());
    }

    #[test]
    fn manifest_parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_manifest(&text);
    }
}
