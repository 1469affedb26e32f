use mugl_core::harness::{mean_and_normalized_std, summarize, PresetOutcome, SeedRecord};
use mugl_core::io::write_summary_csv;
use mugl_core::*;

fn experiment(n_seeds: usize, presets: Vec<ModelPreset>) -> Experiment {
    Experiment {
        family: GraphFamily::Er { p: 0.4 },
        m: 8,
        signals: SignalSettings {
            n: 40,
            epsilon: 0.2,
            mu_star: None,
        },
        presets,
        n_seeds,
        master_seed: 123,
        threshold: 0.01,
    }
}

fn csv_bytes(summary: &ExperimentSummary) -> Vec<u8> {
    let mut buf = Vec::new();
    write_summary_csv(&mut buf, summary).unwrap();
    buf
}

#[test]
fn summary_is_independent_of_thread_count() {
    let exp = experiment(
        6,
        vec![ModelPreset::new(ModelKind::MuglL), ModelPreset::new(ModelKind::Vsgl)],
    );
    let one = run_experiment(&exp, 1).unwrap();
    let again = run_experiment(&exp, 1).unwrap();
    let four = run_experiment(&exp, 4).unwrap();
    assert_eq!(csv_bytes(&one), csv_bytes(&again));
    assert_eq!(csv_bytes(&one), csv_bytes(&four));
    assert_eq!(one, four);
    let seeds: Vec<u64> = one.records.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, (123..129).collect::<Vec<_>>());
}

#[test]
fn summary_rows_and_aggregates() {
    let exp = experiment(4, vec![ModelPreset::new(ModelKind::LogModel)]);
    let s = run_experiment(&exp, 2).unwrap();
    let text = String::from_utf8(csv_bytes(&s)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "model,metric,mean,normalized_std_percent,n_seeds");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("log_model,f_measure,"));
    let f: Vec<f64> = s
        .records
        .iter()
        .map(|r| r.outcomes[0].metrics.unwrap().f_measure)
        .collect();
    let (mean, nstd) = mean_and_normalized_std(&f);
    assert_eq!(s.mean("log_model", "f_measure"), Some(mean));
    assert_eq!(s.metrics[0].normalized_std_percent, nstd);
    assert_eq!(s.failed_runs, 0);
    assert!(!s.all_failed());
}

#[test]
fn single_seed_has_zero_spread() {
    let s = run_experiment(&experiment(1, vec![ModelPreset::new(ModelKind::MuglO)]), 1).unwrap();
    assert!(s.metrics.iter().all(|m| m.normalized_std_percent == 0.0 && m.n_seeds == 1));
}

fn outcome(label: &str, f: Option<f64>) -> PresetOutcome {
    PresetOutcome {
        label: label.into(),
        metrics: f.map(|f| {
            let mut m = score(&[1.0, 0.0, 0.0], &[true, false, false], 0.01).unwrap();
            m.f_measure = f;
            m
        }),
        termination: f.map(|_| Termination::KktTol),
        iters: f.map(|_| 1),
        error: f.is_none().then(|| "nonsmooth".to_string()),
    }
}

fn record(index: usize, outcomes: Vec<PresetOutcome>) -> SeedRecord {
    SeedRecord {
        index,
        seed: index as u64,
        true_edges: 1,
        connected: true,
        outcomes,
    }
}

#[test]
fn failures_are_recorded_per_seed() {
    let exp = experiment(3, vec![ModelPreset::new(ModelKind::MuglO), ModelPreset::new(ModelKind::Vsgl)]);
    let records = vec![
        record(0, vec![outcome("mugl_o", None), outcome("vsgl", Some(0.2))]),
        record(1, vec![outcome("mugl_o", Some(0.8)), outcome("vsgl", Some(0.4))]),
        record(2, vec![outcome("mugl_o", Some(0.6)), outcome("vsgl", None)]),
    ];
    let s = summarize(exp, records);
    assert_eq!(s.failed_runs, 2);
    assert!(!s.all_failed());
    assert_eq!(s.mean("mugl_o", "f_measure"), Some(0.7));
    assert_eq!(s.metrics[0].n_seeds, 2);
}

#[test]
fn all_failed_is_detected() {
    let exp = experiment(2, vec![ModelPreset::new(ModelKind::Vsgl)]);
    let records = vec![record(0, vec![outcome("vsgl", None)]), record(1, vec![outcome("vsgl", None)])];
    let s = summarize(exp, records);
    assert!(s.all_failed());
    assert!(s.mean("vsgl", "f_measure").unwrap().is_nan());
}

#[test]
fn invalid_presets_are_rejected_up_front() {
    let bad = ModelPreset::new(ModelKind::MuglO).with_solver(SolverOptions {
        gamma: 1.5,
        ..SolverOptions::default()
    });
    let err = run_experiment(&experiment(2, vec![ModelPreset::new(ModelKind::Vsgl), bad]), 1).unwrap_err();
    assert!(err.to_string().contains("presets[1]"), "{err}");
    let neg = ModelPreset::new(ModelKind::MuglO).with_radii(-1.0, 0.0);
    assert!(run_experiment(&experiment(1, vec![neg]), 1).is_err());
}

#[test]
fn presets_parse_strictly() {
    let p: ModelPreset = serde_json::from_str(r#"{"model": "mugl_l", "alpha": 0.25}"#).unwrap();
    assert_eq!(p.alpha, 0.25);
    assert_eq!(p.radii, RadiiSource::default());
    let p: ModelPreset =
        serde_json::from_str(r#"{"model": "mugl_o", "radii": {"explicit": {"rho1": 0.1, "rho2": 0.2}}}"#).unwrap();
    assert_eq!(p.radii, RadiiSource::Explicit { rho1: 0.1, rho2: 0.2 });
    assert!(serde_json::from_str::<ModelPreset>(r#"{"model": "mugl_o", "alhpa": 1}"#).is_err());
    assert!(serde_json::from_str::<ModelPreset>(r#"{"model": "glasso"}"#).is_err());
    let solver = r#"{"model": "vsgl", "solver": {"step": 2.0, "tol_kt": 1}}"#;
    assert!(serde_json::from_str::<ModelPreset>(solver).is_err());
}

#[test]
fn summary_json_round_trips() {
    let s = run_experiment(&experiment(2, vec![ModelPreset::new(ModelKind::Vsgl)]), 1).unwrap();
    let text = mugl_core::io::to_json_pretty(&s).unwrap();
    let back: ExperimentSummary = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    // defaults are written out
    assert!(text.contains("\"tol_kkt\""));
    assert!(text.contains("\"label\": \"vsgl\""));
}
