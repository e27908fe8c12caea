//! Artifact layout of every command, and reuse of a saved mean curve.

use std::path::Path;

use mfneuro::experiment::{parse_spec, run, Command, ExperimentSpec, Status};
use mfneuro::meanfield::MeanCurve;
use mfneuro::network::PathEnsemble;
use mfneuro::{Error, Execution};

fn quick(command: Command) -> ExperimentSpec {
    let mut spec = parse_spec(include_str!("../../../configs/quick.toml")).unwrap();
    spec.command = command;
    spec
}

fn names(files: &[std::path::PathBuf]) -> Vec<String> {
    files
        .iter()
        .map(|f| f.file_name().unwrap().to_string_lossy().into_owned())
        .collect()
}

fn first_lines(path: &Path, n: usize) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .take(n)
        .map(str::to_owned)
        .collect()
}

#[test]
fn simulate_writes_csv_binary_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let spec = quick(Command::Simulate);
    let out = run(&spec, Some(dir.path()), Execution::Parallel).unwrap();
    assert!(out.success);
    assert_eq!(
        names(&out.files),
        [
            "config.json",
            "ensemble.csv",
            "ensemble.bin",
            "summary.json"
        ]
    );
    let hash = spec.network.hash();
    let head = first_lines(&dir.path().join("ensemble.csv"), 3);
    assert_eq!(head[0], format!("# config_hash={hash}"));
    assert_eq!(head[1], "# seed=11");
    assert!(head[2].starts_with("path,neuron,population,t,v,y,w"));

    let ens = PathEnsemble::read_binary(&dir.path().join("ensemble.bin")).unwrap();
    assert_eq!(ens.config_hash, hash);
    assert_eq!(ens.n_paths, 8);
    assert_eq!(ens.n_neurons(), 8);
    // thin 10 over 100 steps: nodes 0, 10, ..., 100
    assert_eq!(ens.n_stored(), 11);
    let direct = mfneuro::network::simulate(
        &spec.network,
        &mfneuro::network::EnsembleOptions::new(8).thin(10),
    )
    .unwrap();
    assert!(ens.bit_eq(&direct));

    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config_hash"], hash.as_str());
    assert_eq!(summary["confinement_violations"], 0);
    assert_eq!(summary["command"], "simulate");
}

#[test]
fn meanfield_then_sweep_reuses_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let mf = run(
        &quick(Command::Meanfield),
        Some(&dir.path().join("mf")),
        Execution::Parallel,
    )
    .unwrap();
    assert!(mf.success);
    assert_eq!(
        names(&mf.files),
        ["config.json", "curve.csv", "picard.json"]
    );
    let curve_path = dir.path().join("mf/curve.csv");
    let curve = MeanCurve::read_csv(&curve_path, None).unwrap();
    assert_eq!(curve.labels, ["E", "I"]);
    assert_eq!(curve.grid.n_steps, 100);

    let mut sweep = quick(Command::ChaosSweep);
    sweep.run.curve = Some(curve_path.clone());
    sweep.run.marginal_k = 0;
    let reused = run(
        &sweep,
        Some(&dir.path().join("reused")),
        Execution::Parallel,
    )
    .unwrap();
    assert_eq!(
        names(&reused.files),
        ["config.json", "coupling.csv", "coupling.json"]
    );
    assert_eq!(
        first_lines(&dir.path().join("reused/coupling.csv"), 3)[2],
        "N,D_hat,SE,sqrtN_times_D"
    );

    // solving afresh gives the same curve, hence the same coupling table
    let mut fresh = quick(Command::ChaosSweep);
    fresh.run.marginal_k = 0;
    run(&fresh, Some(&dir.path().join("fresh")), Execution::Parallel).unwrap();
    assert_eq!(
        std::fs::read(dir.path().join("fresh/coupling.csv")).unwrap(),
        std::fs::read(dir.path().join("reused/coupling.csv")).unwrap()
    );
}

#[test]
fn sweep_refuses_a_curve_from_another_config() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &quick(Command::Meanfield),
        Some(&dir.path().join("mf")),
        Execution::Parallel,
    )
    .unwrap();
    let mut sweep = quick(Command::ChaosSweep);
    sweep.network.seed += 1;
    sweep.run.marginal_k = 0;
    sweep.run.curve = Some(dir.path().join("mf/curve.csv"));
    let err = run(&sweep, Some(&dir.path().join("sweep")), Execution::Parallel).unwrap_err();
    assert!(matches!(err, Error::HashMismatch { .. }), "{err}");
}

#[test]
fn full_sweep_writes_marginals() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &quick(Command::ChaosSweep),
        Some(dir.path()),
        Execution::Parallel,
    )
    .unwrap();
    assert_eq!(
        names(&out.files),
        [
            "config.json",
            "curve.csv",
            "picard.json",
            "coupling.csv",
            "coupling.json",
            "marginal.json"
        ]
    );
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("coupling.json")).unwrap()).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 3);
    assert!(report["fit"]["slope"].is_number());
    let marg: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("marginal.json")).unwrap()).unwrap();
    assert_eq!(marg["sizes"].as_array().unwrap().len(), 3);
}

#[test]
fn sweep_needs_three_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = quick(Command::ChaosSweep);
    spec.run.sweep = vec![8, 16];
    assert!(matches!(
        run(&spec, Some(dir.path()), Execution::Parallel),
        Err(Error::Config(_))
    ));
}

#[test]
fn validate_writes_a_report_and_flags_bad_chi() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &quick(Command::Validate),
        Some(dir.path()),
        Execution::Parallel,
    )
    .unwrap();
    assert!(out.success);
    assert_eq!(names(&out.files), ["validate.json"]);

    let mut bad = quick(Command::Validate);
    bad.network.populations[0].params.chi.support_lo = 0.0;
    let report = run(&bad, None, Execution::Parallel).unwrap();
    assert!(!report.success);
    let v = report.validation.unwrap();
    assert_eq!(
        v.result("chi-compact-support").unwrap().status,
        Status::Fail
    );
}

#[test]
fn commands_other_than_validate_need_an_output_directory() {
    let spec = quick(Command::Simulate);
    assert!(matches!(
        run(&spec, None, Execution::Parallel),
        Err(Error::InvalidInput(_))
    ));
}
