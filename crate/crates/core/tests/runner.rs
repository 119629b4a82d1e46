use num_complex::Complex64;
use num_rational::Rational64;

use ns_alpha::diagnostics::{gronwall_h1_bound_check, EnergyMeter, EnergyRecord};
use ns_alpha::dynamics::{integrate, ForcingMode, ForcingSpec, ModelParams, SimulationState};
use ns_alpha::runner::{
    analyze, read_records_file, run, write_records, AnalyzeOptions, InitSpec, Manifest, ModelChoice,
    RunConfig, RunStatus,
};
use ns_alpha::spectral::{random_divfree, Grid};
use ns_alpha::Error;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn small(dir: &std::path::Path, name: &str) -> RunConfig {
    RunConfig {
        n: 4,
        dt: 1e-2,
        t_end: 0.2,
        records: dir.join(format!("{name}.csv")),
        manifest: dir.join(format!("{name}.json")),
        ..RunConfig::default()
    }
}

#[test]
fn zero_data_gives_zero_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig { init: InitSpec::Zero, ..small(dir.path(), "zero") };
    let s = run(&config).unwrap();
    assert_eq!(s.status, RunStatus::Completed);
    let recs = read_records_file(&config.records).unwrap();
    assert_eq!(recs.len(), 3);
    for r in recs {
        assert_eq!([r.e0, r.e_theta, r.d1, r.d1_theta, r.work, r.n1theta, r.v_l2, r.v_h1], [0.0; 8]);
    }
}

#[test]
fn single_mode_run_decays_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let nu = 0.3;
    let config = RunConfig {
        model: ModelChoice::Custom { theta1: r(1, 10), theta2: r(1, 20) },
        nu,
        init: InitSpec::SingleMode { k: [1, 1, 0], amplitude: [c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.2)] },
        ..small(dir.path(), "decay")
    };
    run(&config).unwrap();
    let recs = read_records_file(&config.records).unwrap();
    let (first, last) = (recs[0], recs[recs.len() - 1]);
    let want = first.e0 * (-2.0 * nu * 2.0 * last.t).exp();
    assert!((last.e0 / want - 1.0).abs() <= 1e-9);

    let m = Manifest::read(&config.manifest).unwrap();
    assert_eq!(m.status, "completed");
    assert_eq!(m.records_count, recs.len());
    assert!(m.predicted_t_star_time.is_some());
    assert!(m.energy_identity_residual.unwrap() < 1e-3);
}

#[test]
fn identical_configs_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (small(dir.path(), "a"), small(dir.path(), "b"));
    run(&a).unwrap();
    run(&b).unwrap();
    assert_eq!(std::fs::read(&a.records).unwrap(), std::fs::read(&b.records).unwrap());
    let other = RunConfig { seed: 1, ..small(dir.path(), "c") };
    run(&other).unwrap();
    assert_ne!(std::fs::read(&a.records).unwrap(), std::fs::read(&other.records).unwrap());
}

#[test]
fn invalid_preset_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig { model: ModelChoice::Preset("smagorinsky".into()), ..small(dir.path(), "bad") };
    assert!(matches!(run(&config), Err(Error::Config(_))));
    assert!(!config.records.exists() && !config.manifest.exists());
}

#[test]
fn analyze_accepts_its_own_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let sub = RunConfig { model: ModelChoice::Custom { theta1: r(0, 1), theta2: r(1, 10) }, ..small(dir.path(), "sub") };
    run(&sub).unwrap();
    let report = analyze(&AnalyzeOptions { records: sub.records.clone(), ..Default::default() }).unwrap();
    assert!((report.exponent - 0.4).abs() < 1e-15);

    // critical runs are analyzable when the run fixed an exponent
    let crit = RunConfig { singularity_exponent: Some(0.5), ..small(dir.path(), "crit") };
    run(&crit).unwrap();
    assert!(analyze(&AnalyzeOptions { records: crit.records.clone(), ..Default::default() }).is_ok());

    let plain = small(dir.path(), "plain");
    run(&plain).unwrap();
    let err = analyze(&AnalyzeOptions { records: plain.records, ..Default::default() }).unwrap_err();
    assert!(err.to_string().contains("critical regularization: exponent 0"));
}

#[test]
fn decaying_run_has_no_singular_set() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig { model: ModelChoice::Custom { theta1: r(0, 1), theta2: r(0, 1) }, ..small(dir.path(), "calm") };
    run(&config).unwrap();
    let r = analyze(&AnalyzeOptions { records: config.records, threshold: Some(1e6), ..Default::default() }).unwrap();
    assert!(r.singular_components.is_empty());
    assert_eq!(r.singular_measure, 0.0);
    assert!(r.singular_premeasure.iter().all(|e| e.value == 0.0));
    assert!(r.recovering.iter().all(|e| e.cover_sum == 0.0 && e.chain_holds));
}

#[test]
fn single_excursion_cover_is_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("synthetic.csv");
    let records: Vec<EnergyRecord> = (0..=100)
        .map(|i| {
            let norm = match i {
                50 | 54 => 1.0,
                51..=53 => 3.0,
                _ => 0.5,
            };
            EnergyRecord { t: i as f64 / 100.0, n1theta: norm * norm, ..Default::default() }
        })
        .collect();
    write_records(std::fs::File::create(&path).unwrap(), &records).unwrap();
    let r = analyze(&AnalyzeOptions {
        records: path,
        threshold: Some(1.0),
        exponent: Some(0.5),
        ..Default::default()
    })
    .unwrap();
    assert_eq!(r.singular_components.len(), 1);
    assert!((r.singular_measure - 0.04).abs() < 1e-12);
    let at_one = r.singular_premeasure.iter().find(|e| e.eps == Some(1.0)).unwrap();
    assert!(at_one.value <= 0.2 + 1e-12);
}

#[test]
fn guard_stops_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig { blowup_guard: 1e-6, ..small(dir.path(), "guard") };
    let s = run(&config).unwrap();
    assert_eq!(s.status, RunStatus::BlowupDetected);
    let m = Manifest::read(&config.manifest).unwrap();
    assert_eq!(m.status, "blowup_detected");
    assert!(m.blowup_reason.is_some());
}

// forced growth from a small random state; the fitted constant should not
// depend on the resolution in time
#[test]
fn gronwall_constant_is_stable_under_refinement() {
    let grid = Grid::periodic(16).unwrap();
    let forcing = ForcingSpec::modes(vec![ForcingMode { k: [1, 0, 0], amplitude: [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.5)] }]).unwrap();
    let params = ModelParams::new(1.0 / 6.0, 0.1, 0.1, 1e-2, grid).unwrap().with_forcing(forcing).unwrap();
    let meter = EnergyMeter::new(&params).unwrap();
    let v0 = random_divfree(grid, 3, 2.0).unwrap().scaled(0.05);
    let fit = |dt: f64| {
        let mut recs = Vec::new();
        integrate(SimulationState::new(0.0, v0.clone()).unwrap(), &params, 0.2, dt, 1, |s| recs.push(meter.record(s))).unwrap();
        let g = gronwall_h1_bound_check(&recs, &params, 1.0).unwrap();
        assert!(recs.last().unwrap().v_l2 > recs[0].v_l2);
        g.c_min.expect("a finite constant exists")
    };
    let (coarse, fine) = (fit(4e-3), fit(2e-3));
    assert!(coarse > 0.0 && coarse.is_finite());
    assert!((fine / coarse - 1.0).abs() <= 0.2, "C {coarse} vs {fine}");
}
