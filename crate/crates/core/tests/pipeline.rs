use std::path::Path;

use modal_sep::analysis::Confidence;
use modal_sep::pipeline::{ingest_csv, load_input, run_pipeline, PipelineError, RunConfig, RunReport};
use modal_sep::record::ResponseRecord;

fn quick_config(dir: &Path) -> RunConfig {
    let mut cfg = RunConfig::from_json(
        r#"{
            "input": "simulate:benchmark4dof",
            "simulation": { "samples": 4000 },
            "preprocessing": { "standardize": true },
            "training_samples": 1000,
            "network": { "input_dim": 4, "separation_dim": 4, "epochs": 300, "seed": 3 }
        }"#,
    )
    .unwrap();
    cfg.output_dir = dir.to_path_buf();
    cfg
}

/// The report minus its wall time, which is the one field allowed to differ.
fn numeric_part(report: &RunReport) -> String {
    let mut r = report.clone();
    r.wall_time_s = 0.0;
    r.to_json()
}

#[test]
fn every_artifact_is_written_and_non_empty() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_pipeline(&quick_config(dir.path())).unwrap();
    assert!(!report.modes.is_empty());
    for path in report.artifacts.all() {
        let meta = std::fs::metadata(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(meta.len() > 0, "{} is empty", path.display());
    }
    let shapes = std::fs::read_to_string(report.shapes_path.as_ref().unwrap()).unwrap();
    assert_eq!(shapes.lines().count(), report.modes.len() + 1);
    assert_eq!(report.artifacts.psd.len(), report.modes.len());

    let saved = RunReport::from_json(&std::fs::read_to_string(&report.artifacts.report).unwrap()).unwrap();
    // Traces live in responses.csv rather than the report.
    assert!(saved.modes.iter().all(|m| m.response_trace.is_empty()));
    assert_eq!(saved.to_json(), report.to_json());
}

#[test]
fn zero_epochs_flag_every_mode_low() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(dir.path());
    cfg.network.epochs = 0;
    let report = run_pipeline(&cfg).unwrap();
    assert!(report.final_loss.is_none());
    assert!(report.modes.iter().all(|m| m.confidence == Confidence::Low));
}

#[test]
fn no_selected_modes_writes_only_the_loss_trace() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(dir.path());
    cfg.analysis.selection.prominence = 1e300;
    let report = run_pipeline(&cfg).unwrap();
    assert!(report.modes.is_empty());
    assert!(report.responses_path.is_none() && report.shapes_path.is_none());
    assert!(report.artifacts.loss_trace.exists());
    let mut written: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    written.sort();
    assert_eq!(written, ["loss_trace.csv", "params.json", "report.json"]);
}

#[test]
fn missing_input_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(dir.path());
    cfg.input = dir.path().join("absent.csv").display().to_string();
    cfg.sample_rate = Some(100.0);
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(err, PipelineError::Ingest(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().starts_with("ingest:"));
}

#[test]
fn bad_config_is_a_config_error() {
    let mut cfg = quick_config(Path::new("unused"));
    cfg.network.learning_rate = -1.0;
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(RunConfig::from_json("{ not json").is_err_and(|e| e.exit_code() == 2));
}

#[test]
fn exported_record_ingests_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let loaded = load_input(&cfg).unwrap();
    let path = dir.path().join("record.csv");
    loaded.record.write_csv(&path).unwrap();
    let back = ingest_csv(&path, None).unwrap();
    assert_eq!(back, loaded.record);

    // A run on the exported file matches the run on the simulation.
    let sim = run_pipeline(&RunConfig {
        output_dir: dir.path().join("sim"),
        ..cfg.clone()
    })
    .unwrap();
    let file = run_pipeline(&RunConfig {
        input: path.display().to_string(),
        output_dir: dir.path().join("file"),
        ..cfg
    })
    .unwrap();
    let freqs = |r: &RunReport| r.modes.iter().map(|m| m.frequency).collect::<Vec<_>>();
    assert_eq!(freqs(&sim), freqs(&file));
}

#[test]
fn repeated_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = quick_config(dir.path());
    let a = run_pipeline(&cfg).unwrap();
    let b = run_pipeline(&cfg).unwrap();
    assert_eq!(numeric_part(&a), numeric_part(&b));
    assert_eq!(a.modes, b.modes);

    // The echoed config is enough to reproduce the run.
    let again = run_pipeline(&a.config_echo).unwrap();
    assert_eq!(numeric_part(&a), numeric_part(&again));
}

#[test]
fn restarts_keep_the_purest_window() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick_config(dir.path());
    cfg.restarts = 3;
    cfg.restart_stride = Some(1000);
    let report = run_pipeline(&cfg).unwrap();
    let purity = report.window_purity.unwrap();
    let (start, end) = report.training_window;
    assert_eq!(end - start, 1000);
    assert!(start % 1000 == 0 && start <= 2000);

    // Rerunning on the kept window alone gives the same weights.
    let pinned = cfg.window(start / 1000);
    let single = run_pipeline(&RunConfig {
        output_dir: dir.path().join("pinned"),
        ..pinned
    })
    .unwrap();
    assert_eq!(single.modes, report.modes);
    assert!(purity > 0.0);
}

#[test]
fn csv_without_sidecar_needs_a_sample_rate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bare.csv");
    std::fs::write(&path, "a,b\n1,2\n3,4\n5,6\n").unwrap();
    assert!(ResponseRecord::<f64>::read_csv(&path, None).is_err());
    let rec = ingest_csv(&path, Some(10.0)).unwrap();
    assert_eq!(rec.channels(), 2);
    assert_eq!(rec.len(), 3);
}
