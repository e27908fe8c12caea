use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigIssue, Error, Result};
use crate::integrators::TimeGrid;
use crate::meanfield::YbarClosure;
use crate::model::{
    ChiSpec, GateRates, MembraneVariant, PairParams, PopulationParams, SigmoidParams,
};
use crate::network::{Conductance, InitialLaw, NetworkConfig, PopulationConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    Meanfield,
    ChaosSweep,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Meanfield => "meanfield",
            Command::ChaosSweep => "chaos-sweep",
            Command::Validate => "validate",
        }
    }
}

/// Numerical and output settings of a command (the `[run]` table).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunOptions {
    /// Monte Carlo paths of the N-neuron system (per size for a sweep).
    pub n_paths: usize,
    /// Store every `thin`-th grid node in ensemble exports.
    pub thin: usize,
    /// Network sizes of a chaos sweep.
    pub sweep: Vec<usize>,
    /// Limit copies per population.
    pub m: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub closure: YbarClosure,
    /// Particles per population compared against the limit marginal.
    /// Zero skips the marginal check.
    pub marginal_k: usize,
    /// Previously computed mean curve to reuse in a chaos sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            n_paths: 100,
            thin: 1,
            sweep: vec![16, 64, 256, 1024],
            m: 10_000,
            tol: 1e-3,
            max_iter: 20,
            closure: YbarClosure::ClosedForm,
            marginal_k: 0,
            curve: None,
        }
    }
}

impl RunOptions {
    fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut need = |ok: bool, path: &str, msg: &str| {
            if !ok {
                out.push(ConfigIssue::new(path, msg));
            }
        };
        need(self.n_paths >= 1, "run.n_paths", "must be at least 1");
        need(self.thin >= 1, "run.thin", "must be at least 1");
        need(self.m >= 2, "run.m", "must be at least 2");
        need(
            self.tol.is_finite() && self.tol > 0.0,
            "run.tol",
            "must be finite and > 0",
        );
        need(self.max_iter >= 1, "run.max_iter", "must be at least 1");
        need(
            self.sweep.windows(2).all(|w| w[0] < w[1]),
            "run.sweep",
            "sizes must be strictly increasing",
        );
        out
    }
}

/// A parsed experiment: the network, what to do with it and where to write.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub command: Command,
    pub network: NetworkConfig,
    pub run: RunOptions,
    pub output: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPopulation {
    label: String,
    size: usize,
    membrane: MembraneVariant,
    #[serde(default)]
    sigma_v: f64,
    a_r: f64,
    a_d: f64,
    sigmoid: SigmoidParams,
    #[serde(default)]
    chi: ChiSpec,
    #[serde(default)]
    gates: GateRates,
    init: InitialLaw,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    source: String,
    target: String,
    #[serde(flatten)]
    params: PairParams,
}

fn default_conductance() -> Conductance {
    Conductance::SignPreserving
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    command: Option<Command>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_conductance")]
    conductance: Conductance,
    grid: RawGrid,
    population: Vec<RawPopulation>,
    #[serde(default)]
    pair: Vec<RawPair>,
    #[serde(default)]
    run: RunOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<PathBuf>,
}

/// Dotted paths present in `input` but absent from the re-serialized spec.
fn unknown_keys(input: &toml::Value, known: &toml::Value, path: &str, out: &mut Vec<ConfigIssue>) {
    match (input, known) {
        (toml::Value::Table(a), toml::Value::Table(b)) => {
            for (key, value) in a {
                let sub = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                match b.get(key) {
                    Some(k) => unknown_keys(value, k, &sub, out),
                    None => out.push(ConfigIssue::new(sub, "unknown key")),
                }
            }
        }
        (toml::Value::Array(a), toml::Value::Array(b)) => {
            for (k, (x, y)) in a.iter().zip(b).enumerate() {
                unknown_keys(x, y, &format!("{path}[{k}]"), out);
            }
        }
        _ => {}
    }
}

fn build(raw: RawSpec, issues: &mut Vec<ConfigIssue>) -> ExperimentSpec {
    let grid = match (raw.grid.n_steps, raw.grid.dt) {
        (Some(n), None) => TimeGrid::new(raw.grid.t_end, n),
        (None, dt) => {
            let dt = dt.unwrap_or(0.01);
            TimeGrid::from_dt(raw.grid.t_end, dt).unwrap_or_else(|e| {
                issues.push(ConfigIssue::new("grid.dt", e));
                TimeGrid::new(raw.grid.t_end, 0)
            })
        }
        (Some(n), Some(_)) => {
            issues.push(ConfigIssue::new(
                "grid",
                "give either n_steps or dt, not both",
            ));
            TimeGrid::new(raw.grid.t_end, n)
        }
    };
    let labels: Vec<String> = raw.population.iter().map(|p| p.label.clone()).collect();
    let p = labels.len();
    let populations = raw
        .population
        .into_iter()
        .map(|r| PopulationConfig {
            params: PopulationParams {
                label: r.label,
                membrane: r.membrane,
                sigma_v: r.sigma_v,
                a_r: r.a_r,
                a_d: r.a_d,
                sigmoid: r.sigmoid,
                chi: r.chi,
                gates: r.gates,
            },
            size: r.size,
            init: r.init,
        })
        .collect();

    let mut slots: Vec<Option<PairParams>> = vec![None; p * p];
    for (k, pair) in raw.pair.iter().enumerate() {
        let mut find = |name: &str, field: &str| {
            let idx = labels.iter().position(|l| l == name);
            if idx.is_none() {
                issues.push(ConfigIssue::new(
                    format!("pair[{k}].{field}"),
                    format!("no population labelled {name:?}"),
                ));
            }
            idx
        };
        let (s, t) = (find(&pair.source, "source"), find(&pair.target, "target"));
        if let (Some(s), Some(t)) = (s, t) {
            if slots[t * p + s].replace(pair.params).is_some() {
                issues.push(ConfigIssue::new(
                    format!("pair[{k}]"),
                    format!("synapse {} -> {} given twice", pair.source, pair.target),
                ));
            }
        }
    }
    for (idx, slot) in slots.iter().enumerate() {
        if slot.is_none() {
            issues.push(ConfigIssue::new(
                "pair",
                format!("missing synapse {} -> {}", labels[idx % p], labels[idx / p]),
            ));
        }
    }
    let pairs = slots
        .into_iter()
        .map(|s| {
            s.unwrap_or(PairParams {
                v_rev: 0.0,
                j_mean: 0.0,
                sigma_j: 0.0,
                theta: 1.0,
            })
        })
        .collect();
    ExperimentSpec {
        command: raw.command.unwrap_or(Command::Validate),
        network: NetworkConfig {
            populations,
            pairs,
            conductance: raw.conductance,
            grid,
            seed: raw.seed,
        },
        run: raw.run,
        output: raw.output,
    }
}

/// Parses a TOML spec and collects every validation problem without
/// failing on them. Syntax and type errors are still fatal.
pub fn parse_spec_lenient(text: &str) -> Result<(ExperimentSpec, Vec<ConfigIssue>)> {
    let value: toml::Value = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let raw: RawSpec = value
        .clone()
        .try_into()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let mut issues = Vec::new();
    let known = toml::Value::try_from(&raw).map_err(|e| Error::Parse(e.to_string()))?;
    unknown_keys(&value, &known, "", &mut issues);

    let spec = build(raw, &mut issues);
    issues.extend(spec.network.issues());
    issues.extend(spec.run.issues());
    if spec.network.n_total() > 0 {
        for (k, &n) in spec.run.sweep.iter().enumerate() {
            if let Err(Error::Config(mut e)) = spec.network.with_total(n) {
                for i in &mut e {
                    i.path = format!("run.sweep[{k}]");
                }
                issues.extend(e);
            }
        }
    }
    Ok((spec, issues))
}

/// Parses and fully validates a TOML spec, reporting all problems at once.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec> {
    let (spec, issues) = parse_spec_lenient(text)?;
    if issues.is_empty() {
        Ok(spec)
    } else {
        Err(Error::Config(issues))
    }
}
