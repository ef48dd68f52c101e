use opcone::suites::{emit_report, run_suite, CaseStatus, SuiteConfig, SuiteReport, SUITES};
use opcone::Tolerances;

fn cfg(name: &str, trials: Option<usize>, seed: u64) -> SuiteConfig {
    let mut c = SuiteConfig::new(name);
    c.trials = trials;
    c.seed = seed;
    c
}

#[test]
fn every_suite_passes_on_a_short_run() {
    for s in SUITES {
        let trials = Some(s.default_trials.min(20));
        let r = run_suite(&cfg(s.name, trials, 5)).unwrap();
        assert!(r.passed(), "{}: {:?}", s.name, r.failures.first());
        assert!(!r.cases.is_empty(), "{}", s.name);
    }
}

#[test]
fn seeds_change_samples_but_not_verdicts() {
    let a = run_suite(&cfg("cone", Some(10), 1)).unwrap();
    let b = run_suite(&cfg("cone", Some(10), 2)).unwrap();
    assert!(a.passed() && b.passed());
    let margins = |r: &SuiteReport| r.cases.iter().map(|c| c.margin).collect::<Vec<_>>();
    assert_ne!(margins(&a), margins(&b));
}

#[test]
fn reports_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let r = run_suite(&cfg("support-join", Some(10), 0)).unwrap();
    emit_report(&r, &path).unwrap();
    let back: SuiteReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, r);
    assert!(emit_report(&r, &dir.path().join("missing/report.json")).is_err());
}

#[test]
fn tight_tolerances_produce_recorded_failures() {
    let mut c = cfg("support-routes", Some(4), 0);
    c.tol = Tolerances::new(1e-9, 1e-300, 1e-8).unwrap();
    let r = run_suite(&c).unwrap();
    assert!(!r.passed());
    assert!(r.cases.iter().any(|c| c.status == CaseStatus::Fail));
    assert!(r.failures.iter().all(|f| f.seed.is_some()));
}

#[test]
fn config_is_echoed() {
    let mut c = cfg("roots", Some(12), 9);
    c.dim = Some(3);
    let r = run_suite(&c).unwrap();
    assert_eq!((r.config.dim, r.config.trials, r.config.seed), (3, 12, 9));
    assert_eq!(r.config.tol, Tolerances::default());
}
