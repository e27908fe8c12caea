//! Exercises the `mfneuro` binary end to end.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mfneuro"));
    c.env("RUST_LOG", "warn");
    c
}

fn quick() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/quick.toml")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_passes_on_the_quick_spec() {
    let o = run(&["validate", "--spec", quick().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("PASS  confinement"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn validate_exits_nonzero_and_names_the_bad_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = std::fs::read_to_string(quick())
        .unwrap()
        .replacen("a_d = 0.5", "a_d = -1.0", 1)
        .replacen(
            "sigma_v = 0.4",
            "sigma_v = 0.4\nchi = { support_lo = 0.0, support_hi = 0.9, ramp = 0.05 }",
            1,
        );
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, bad).unwrap();
    let o = run(&["validate", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL  config-valid"), "{text}");
    assert!(text.contains("population[0].a_d"), "{text}");
    assert!(text.contains("FAIL  chi-compact-support"), "{text}");
    assert!(text.contains("SKIP  confinement"), "{text}");
}

#[test]
fn simulate_rejects_an_invalid_spec_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let bad = std::fs::read_to_string(quick())
        .unwrap()
        .replacen("a_d = 0.5", "a_d = -1.0", 1);
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, bad).unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "simulate",
        "--spec",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("a_d"));
    assert!(!out.exists());
}

#[test]
fn missing_spec_is_an_error() {
    let o = run(&[
        "simulate",
        "--spec",
        "/nonexistent/spec.toml",
        "--out",
        "/tmp/never",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn worker_count_does_not_change_the_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = quick();
    let mut outputs = Vec::new();
    for (tag, extra) in [
        ("one", vec!["--workers", "1"]),
        ("four", vec!["--workers", "4"]),
        ("seq", vec!["--sequential"]),
    ] {
        let out = dir.path().join(tag);
        let mut args = extra.clone();
        args.extend([
            "simulate",
            "--spec",
            spec.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        let o = run(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(out);
    }
    for name in [
        "config.json",
        "ensemble.csv",
        "ensemble.bin",
        "summary.json",
    ] {
        let a = std::fs::read(outputs[0].join(name)).unwrap();
        for other in &outputs[1..] {
            assert_eq!(a, std::fs::read(other.join(name)).unwrap(), "{name}");
        }
    }
}

#[test]
fn meanfield_curve_feeds_a_later_sweep() {
    let dir = tempfile::tempdir().unwrap();
    // the marginal check needs a fresh limit ensemble, so switch it off
    let text =
        std::fs::read_to_string(quick())
            .unwrap()
            .replacen("marginal_k = 2", "marginal_k = 0", 1);
    let spec = dir.path().join("spec.toml");
    std::fs::write(&spec, text).unwrap();
    let mf = dir.path().join("mf");
    let o = run(&[
        "meanfield",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        mf.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("curve.csv"));

    let sweep = dir.path().join("sweep");
    let o = run(&[
        "chaos-sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        sweep.to_str().unwrap(),
        "--curve",
        mf.join("curve.csv").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(sweep.join("coupling.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
    assert!(!sweep.join("picard.json").exists());
}

#[test]
fn sweep_refuses_a_foreign_curve() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        std::fs::read_to_string(quick())
            .unwrap()
            .replacen("marginal_k = 2", "marginal_k = 0", 1);
    let spec = dir.path().join("spec.toml");
    std::fs::write(&spec, &text).unwrap();
    let other = dir.path().join("other.toml");
    std::fs::write(&other, text.replacen("seed = 11", "seed = 12", 1)).unwrap();
    let mf = dir.path().join("mf");
    assert!(run(&[
        "meanfield",
        "--spec",
        other.to_str().unwrap(),
        "--out",
        mf.to_str().unwrap()
    ])
    .status
    .success());
    let o = run(&[
        "chaos-sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        dir.path().join("sweep").to_str().unwrap(),
        "--curve",
        mf.join("curve.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hash"));
}
