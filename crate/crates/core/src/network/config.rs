use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ConfigIssue, Error, Result};
use crate::integrators::{NormalStream, TimeGrid};
use crate::model::{MembraneVariant, PairParams, PopulationParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conductance {
    /// `J = j_mean + sigma_j · white noise`.
    Simple,
    /// Per-neuron CIR conductances.
    SignPreserving,
}

/// Scalar law used for initial conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "lowercase")]
pub enum Distribution {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, std: f64 },
}

impl Distribution {
    pub fn constant(value: f64) -> Self {
        Distribution::Constant { value }
    }

    pub fn sample(&self, s: &mut NormalStream) -> f64 {
        match *self {
            Distribution::Constant { value } => value,
            Distribution::Uniform { lo, hi } => lo + (hi - lo) * s.uniform(),
            Distribution::Normal { mean, std } => mean + std * s.standard(),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Constant { value } => value,
            Distribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            Distribution::Normal { mean, .. } => mean,
        }
    }

    /// Closed support `[lo, hi]`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Distribution::Constant { value } => (value, value),
            Distribution::Uniform { lo, hi } => (lo, hi),
            Distribution::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn issues(&self, path: &str, within: Option<(f64, f64)>) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let finite_params = match *self {
            Distribution::Constant { value } => value.is_finite(),
            Distribution::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo <= hi,
            Distribution::Normal { mean, std } => mean.is_finite() && std.is_finite() && std >= 0.0,
        };
        if !finite_params {
            out.push(ConfigIssue::new(path, format!("ill-formed law {self:?}")));
            return out;
        }
        if let Some((lo, hi)) = within {
            let (a, b) = self.support();
            if a < lo || b > hi {
                out.push(ConfigIssue::new(
                    path,
                    format!("support [{a}, {b}] must lie within [{lo}, {hi}]"),
                ));
            }
        }
        out
    }
}

fn y0_default() -> Distribution {
    Distribution::Uniform { lo: 0.0, hi: 0.2 }
}

/// Initial laws of one population; draws are i.i.d. across its neurons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialLaw {
    pub v: Distribution,
    #[serde(default = "y0_default")]
    pub y: Distribution,
    /// FHN recovery variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Distribution>,
    /// HH gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Distribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Distribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Distribution>,
    /// Initial maximal conductances for every source population. Defaults to
    /// the point mass at that synapse's `j_mean`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Distribution>,
}

impl InitialLaw {
    pub fn new(v: Distribution) -> Self {
        Self {
            v,
            y: y0_default(),
            w: None,
            n: None,
            m: None,
            h: None,
            j: None,
        }
    }

    pub fn w_law(&self) -> Distribution {
        self.w.unwrap_or(Distribution::constant(0.0))
    }

    /// `(n, m, h)` laws; defaults are the resting steady states at -65 mV.
    pub fn gate_laws(&self) -> [Distribution; 3] {
        [
            self.n.unwrap_or(Distribution::constant(0.3177)),
            self.m.unwrap_or(Distribution::constant(0.0529)),
            self.h.unwrap_or(Distribution::constant(0.5961)),
        ]
    }

    pub fn j_law(&self, pair: &PairParams) -> Distribution {
        self.j.unwrap_or(Distribution::constant(pair.j_mean))
    }

    fn issues(&self, path: &str, membrane: &MembraneVariant) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        out.extend(self.v.issues(&format!("{path}.v"), None));
        out.extend(self.y.issues(&format!("{path}.y"), Some((0.0, 1.0))));
        if membrane.is_hh() {
            for (name, law) in ["n", "m", "h"].iter().zip(self.gate_laws()) {
                out.extend(law.issues(&format!("{path}.{name}"), Some((0.0, 1.0))));
            }
            if self.w.is_some() {
                out.push(ConfigIssue::new(
                    format!("{path}.w"),
                    "Hodgkin–Huxley populations carry gates, not w",
                ));
            }
        } else {
            out.extend(self.w_law().issues(&format!("{path}.w"), None));
            for (name, law) in [("n", self.n), ("m", self.m), ("h", self.h)] {
                if law.is_some() {
                    out.push(ConfigIssue::new(
                        format!("{path}.{name}"),
                        "FitzHugh–Nagumo populations carry w, not gates",
                    ));
                }
            }
        }
        if let Some(j) = &self.j {
            out.extend(j.issues(&format!("{path}.j"), Some((0.0, f64::INFINITY))));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub params: PopulationParams,
    /// N_γ
    pub size: usize,
    pub init: InitialLaw,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub populations: Vec<PopulationConfig>,
    /// Row-major by target population: `pairs[target * P + source]`.
    pub pairs: Vec<PairParams>,
    pub conductance: Conductance,
    pub grid: TimeGrid,
    pub seed: u64,
}

impl NetworkConfig {
    pub fn n_populations(&self) -> usize {
        self.populations.len()
    }

    pub fn n_total(&self) -> usize {
        self.populations.iter().map(|p| p.size).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.populations.iter().map(|p| p.size).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.populations
            .iter()
            .map(|p| p.params.label.clone())
            .collect()
    }

    /// `c_γ = N_γ / N`.
    pub fn proportions(&self) -> Vec<f64> {
        let n = self.n_total() as f64;
        self.populations.iter().map(|p| p.size as f64 / n).collect()
    }

    /// Neuron-to-population map `p(i)`; neurons are numbered population by population.
    pub fn population_map(&self) -> Vec<usize> {
        self.populations
            .iter()
            .enumerate()
            .flat_map(|(g, p)| std::iter::repeat_n(g, p.size))
            .collect()
    }

    /// Index of the first neuron of each population.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.populations
            .iter()
            .map(|p| {
                let o = acc;
                acc += p.size;
                o
            })
            .collect()
    }

    pub fn pair(&self, target: usize, source: usize) -> &PairParams {
        &self.pairs[target * self.n_populations() + source]
    }

    pub fn pair_row(&self, target: usize) -> &[PairParams] {
        let p = self.n_populations();
        &self.pairs[target * p..(target + 1) * p]
    }

    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let p = self.n_populations();
        if p == 0 {
            out.push(ConfigIssue::new(
                "population",
                "at least one population is required",
            ));
        }
        for (k, pop) in self.populations.iter().enumerate() {
            let path = format!("population[{k}]");
            out.extend(pop.params.issues(&path));
            if pop.size == 0 {
                out.push(ConfigIssue::new(
                    format!("{path}.size"),
                    "population must not be empty",
                ));
            }
            out.extend(
                pop.init
                    .issues(&format!("{path}.init"), &pop.params.membrane),
            );
            if self.populations[..k]
                .iter()
                .any(|q| q.params.label == pop.params.label)
            {
                out.push(ConfigIssue::new(
                    format!("{path}.label"),
                    format!("duplicate population label {:?}", pop.params.label),
                ));
            }
        }
        if self.pairs.len() != p * p {
            out.push(ConfigIssue::new(
                "pair",
                format!(
                    "expected {} synapse entries (one per ordered pair), got {}",
                    p * p,
                    self.pairs.len()
                ),
            ));
        } else {
            let needs_theta = self.conductance == Conductance::SignPreserving;
            for t in 0..p {
                for s in 0..p {
                    let path = format!(
                        "pair[{}->{}]",
                        self.populations[s].params.label, self.populations[t].params.label
                    );
                    out.extend(self.pair(t, s).issues(&path, needs_theta));
                }
            }
        }
        out.extend(self.grid.issues("grid"));
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    /// Same model rescaled to `n_total` neurons at fixed proportions. Fails if
    /// some `c_γ · n_total` is not an integer.
    pub fn with_total(&self, n_total: usize) -> Result<NetworkConfig> {
        let base = self.n_total();
        let mut sizes = Vec::with_capacity(self.n_populations());
        for pop in &self.populations {
            let scaled = pop.size * n_total;
            if base == 0 || !scaled.is_multiple_of(base) || scaled / base == 0 {
                return Err(Error::Config(vec![ConfigIssue::new(
                    "sweep",
                    format!(
                        "N = {n_total} cannot keep the population proportions fixed ({} = {}/{} of N is not a positive integer)",
                        pop.params.label, pop.size, base
                    ),
                )]));
            }
            sizes.push(scaled / base);
        }
        let mut out = self.clone();
        for (pop, n) in out.populations.iter_mut().zip(sizes) {
            pop.size = n;
        }
        Ok(out)
    }

    /// Stable hex digest of the canonical JSON form; stamped on every artifact.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("network config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
