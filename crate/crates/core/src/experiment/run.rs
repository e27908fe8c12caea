use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use super::{validate, Command, ExperimentSpec, ValidationReport};
use crate::chaos::{chaos_sweep, marginal_chaos_check, CouplingOptions};
use crate::error::{ConfigIssue, Error, Result};
use crate::exec::Execution;
use crate::meanfield::{solve_fixed_point, FixedPointOptions, MeanCurve, MeanFieldSolution};
use crate::network::{simulate, EnsembleOptions};

/// What a command produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// Filled by `validate`.
    pub validation: Option<ValidationReport>,
    /// False if a property failed or the fixed point was not reached.
    pub success: bool,
}

#[derive(Serialize)]
struct Stamp<'a> {
    config_hash: &'a str,
    seed: u64,
    command: &'static str,
}

#[derive(Serialize)]
struct SimulateSummary<'a> {
    #[serde(flatten)]
    stamp: Stamp<'a>,
    n_paths: usize,
    n_neurons: usize,
    stored_times: usize,
    confinement_violations: usize,
    max_mean_square_v: f64,
}

#[derive(Serialize)]
struct PicardSummary<'a> {
    #[serde(flatten)]
    stamp: Stamp<'a>,
    m: usize,
    tol: f64,
    converged: bool,
    iterations: usize,
    distances: &'a [f64],
}

fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    value: &T,
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(())
}

fn fixed_point(spec: &ExperimentSpec, exec: Execution) -> Result<MeanFieldSolution> {
    solve_fixed_point(
        &spec.network,
        &FixedPointOptions {
            m: spec.run.m,
            tol: spec.run.tol,
            max_iter: spec.run.max_iter,
            closure: spec.run.closure,
            exec,
        },
    )
}

fn write_picard(
    dir: &Path,
    spec: &ExperimentSpec,
    sol: &MeanFieldSolution,
    stamp: Stamp<'_>,
    files: &mut Vec<PathBuf>,
) -> Result<()> {
    let curve_path = dir.join("curve.csv");
    sol.curve.write_csv(&curve_path)?;
    files.push(curve_path);
    write_json(
        dir,
        "picard.json",
        &PicardSummary {
            stamp,
            m: spec.run.m,
            tol: spec.run.tol,
            converged: sol.converged,
            iterations: sol.iterations(),
            distances: &sol.distances,
        },
        files,
    )
}

/// Executes `spec.command`, writing artifacts into `out` (required for all
/// commands but `validate`). Every artifact carries the config hash and seed.
pub fn run(spec: &ExperimentSpec, out: Option<&Path>, exec: Execution) -> Result<RunOutcome> {
    let cfg = &spec.network;
    let hash = cfg.hash();
    let stamp = || Stamp {
        config_hash: &hash,
        seed: cfg.seed,
        command: spec.command.name(),
    };
    let mut files = Vec::new();
    if spec.command == Command::Validate {
        let report = validate(spec, &cfg.issues());
        let success = report.passed();
        if let Some(dir) = out {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            write_json(dir, "validate.json", &report, &mut files)?;
        }
        return Ok(RunOutcome {
            files,
            validation: Some(report),
            success,
        });
    }

    cfg.validate()?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| spec.output.clone())
        .ok_or_else(|| {
            Error::InvalidInput(format!("{} needs an output directory", spec.command.name()))
        })?;
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_json(&dir, "config.json", cfg, &mut files)?;

    let success = match spec.command {
        Command::Simulate => {
            let ens = simulate(
                cfg,
                &EnsembleOptions {
                    n_paths: spec.run.n_paths,
                    thin: spec.run.thin,
                    exec,
                },
            )?;
            let csv = dir.join("ensemble.csv");
            ens.write_csv(&csv)?;
            files.push(csv);
            let bin = dir.join("ensemble.bin");
            ens.write_binary(&bin)?;
            files.push(bin);
            let violations = ens.confinement_violations();
            write_json(
                &dir,
                "summary.json",
                &SimulateSummary {
                    stamp: stamp(),
                    n_paths: ens.n_paths,
                    n_neurons: ens.n_neurons(),
                    stored_times: ens.n_stored(),
                    confinement_violations: violations,
                    max_mean_square_v: ens.mean_square_v().into_iter().fold(0.0, f64::max),
                },
                &mut files,
            )?;
            violations == 0
        }
        Command::Meanfield => {
            let sol = fixed_point(spec, exec)?;
            write_picard(&dir, spec, &sol, stamp(), &mut files)?;
            sol.converged
        }
        Command::ChaosSweep => {
            if spec.run.sweep.len() < 3 {
                return Err(Error::Config(vec![ConfigIssue::new(
                    "run.sweep",
                    "a chaos sweep needs at least 3 sizes to fit a rate",
                )]));
            }
            let (curve, converged, terminal) = match &spec.run.curve {
                Some(path) => {
                    info!("reusing mean curve {}", path.display());
                    (MeanCurve::read_csv(path, Some(&hash))?, true, None)
                }
                None => {
                    let sol = fixed_point(spec, exec)?;
                    write_picard(&dir, spec, &sol, stamp(), &mut files)?;
                    let terminal: Vec<Vec<f64>> = (0..cfg.n_populations())
                        .map(|g| sol.ensemble.terminal_v(g))
                        .collect();
                    (sol.curve, sol.converged, Some(terminal))
                }
            };
            let report = chaos_sweep(
                cfg,
                &spec.run.sweep,
                &curve,
                &CouplingOptions {
                    n_paths: spec.run.n_paths,
                    exec,
                },
            )?;
            let csv = dir.join("coupling.csv");
            report.write_csv(&csv)?;
            files.push(csv);
            let json = dir.join("coupling.json");
            report.write_json(&json)?;
            files.push(json);
            if spec.run.marginal_k > 0 {
                let Some(limit_v) = terminal else {
                    return Err(Error::InvalidInput(
                        "the marginal check needs a fresh limit ensemble; drop run.curve".into(),
                    ));
                };
                let checks = spec
                    .run
                    .sweep
                    .iter()
                    .map(|&n| {
                        marginal_chaos_check(
                            &cfg.with_total(n)?,
                            spec.run.marginal_k,
                            spec.run.n_paths,
                            &limit_v,
                            exec,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                #[derive(Serialize)]
                struct Marginals<'a> {
                    #[serde(flatten)]
                    stamp: Stamp<'a>,
                    sizes: Vec<crate::chaos::MarginalChaos>,
                }
                write_json(
                    &dir,
                    "marginal.json",
                    &Marginals {
                        stamp: stamp(),
                        sizes: checks,
                    },
                    &mut files,
                )?;
            }
            converged
        }
        Command::Validate => unreachable!(),
    };
    Ok(RunOutcome {
        files,
        validation: None,
        success,
    })
}
