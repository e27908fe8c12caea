use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use mfneuro::exec::with_workers;
use mfneuro::experiment::{parse_spec, parse_spec_lenient, run, Command, ExperimentSpec};
use mfneuro::Execution;

/// Batch front-end for network simulation, mean-field solving and
/// propagation-of-chaos sweeps.
#[derive(Parser)]
#[command(name = "mfneuro", version)]
struct Cli {
    /// Worker threads for path-parallel work (default: all cores).
    #[arg(long, global = true, env = "MFNEURO_WORKERS")]
    workers: Option<usize>,

    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Io {
    /// Experiment spec (TOML).
    #[arg(long)]
    spec: PathBuf,
    /// Output directory; created if missing. Falls back to `output` in the spec.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate path ensembles of the N-neuron system.
    Simulate(Io),
    /// Solve the mean-field fixed point and export the mean curves.
    Meanfield(Io),
    /// Coupled N-system / limit-copy runs over the sweep sizes.
    ChaosSweep {
        #[command(flatten)]
        io: Io,
        /// Reuse a mean curve from a previous `meanfield` run.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Check every model invariant for the spec; exits nonzero on failure.
    Validate {
        #[arg(long)]
        spec: PathBuf,
        /// Also write validate.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let (spec, out): (ExperimentSpec, Option<PathBuf>) = match cli.command {
        Cmd::Validate { spec, out } => {
            // invalid specs still get the full property report
            let (mut s, _) = parse_spec_lenient(&read(&spec)?)?;
            s.command = Command::Validate;
            (s, out)
        }
        Cmd::Simulate(io) => (
            with_command(parse_spec(&read(&io.spec)?)?, Command::Simulate),
            io.out,
        ),
        Cmd::Meanfield(io) => (
            with_command(parse_spec(&read(&io.spec)?)?, Command::Meanfield),
            io.out,
        ),
        Cmd::ChaosSweep { io, curve } => {
            let mut s = with_command(parse_spec(&read(&io.spec)?)?, Command::ChaosSweep);
            if curve.is_some() {
                s.run.curve = curve;
            }
            (s, io.out)
        }
    };
    let outcome = with_workers(cli.workers, || run(&spec, out.as_deref(), exec))?;
    if let Some(report) = &outcome.validation {
        print!("{report}");
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.success)
}

fn with_command(mut spec: ExperimentSpec, command: Command) -> ExperimentSpec {
    spec.command = command;
    spec
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("finished with failures");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
