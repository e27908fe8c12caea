use std::fmt;

use serde::Serialize;

use super::ExperimentSpec;
use crate::chaos::{run_coupled, CouplingOptions};
use crate::error::ConfigIssue;
use crate::integrators::{Component, RngStreamKey};
use crate::meanfield::{ybar_from_ms, MeanCurve};
use crate::model::{Gate, MembraneVariant, Recovery};
use crate::network::{simulate, EnsembleOptions, NetworkConfig};
use crate::presets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub config_hash: String,
    pub seed: u64,
    pub results: Vec<PropertyResult>,
}

impl ValidationReport {
    /// True when nothing failed (skipped properties do not count).
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    pub fn result(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            writeln!(f, "{tag:4}  {:28} {}", r.name, r.detail)?;
        }
        Ok(())
    }
}

fn check(
    name: &'static str,
    failures: Vec<String>,
    ok_detail: impl Into<String>,
) -> PropertyResult {
    if failures.is_empty() {
        PropertyResult {
            name,
            status: Status::Pass,
            detail: ok_detail.into(),
        }
    } else {
        let mut detail = failures[..failures.len().min(3)].join("; ");
        if failures.len() > 3 {
            detail.push_str(&format!("; and {} more", failures.len() - 3));
        }
        PropertyResult {
            name,
            status: Status::Fail,
            detail,
        }
    }
}

fn skipped(name: &'static str, why: &str) -> PropertyResult {
    PropertyResult {
        name,
        status: Status::Skipped,
        detail: why.into(),
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |k| lo + (hi - lo) * k as f64 / n as f64)
}

fn coefficient_properties(cfg: &NetworkConfig) -> Vec<PropertyResult> {
    let pops: Vec<_> = cfg.populations.iter().map(|p| &p.params).collect();
    let mut out = Vec::new();

    let mut bad = Vec::new();
    for p in &pops {
        let vals: Vec<f64> = grid(-150.0, 150.0, 6000)
            .map(|v| p.sigmoid.eval(v))
            .collect();
        if vals.windows(2).any(|w| !(w[1] >= w[0]))
            || vals.iter().any(|s| !(*s >= 0.0 && *s <= p.sigmoid.c_max))
        {
            bad.push(format!(
                "{}: S not increasing or out of [0, c_max]",
                p.label
            ));
        }
    }
    out.push(check(
        "sigmoid-monotone",
        bad,
        "non-decreasing and bounded on [-150, 150]",
    ));

    let mut bad = Vec::new();
    for p in &pops {
        let xs: Vec<f64> = grid(-0.5, 1.5, 20_000).collect();
        // a support touching 0 or 1 shows up within a couple of grid cells
        let margin = 2.0 * (xs[1] - xs[0]);
        let positive: Vec<f64> = xs
            .iter()
            .copied()
            .filter(|&x| p.chi.eval(x) > 0.0)
            .collect();
        if xs.iter().any(|&x| !(0.0..=1.0).contains(&p.chi.eval(x))) {
            bad.push(format!("{}: chi leaves [0, 1]", p.label));
        }
        match (positive.first(), positive.last()) {
            (Some(&a), Some(&b)) if a > margin && b < 1.0 - margin => {}
            (Some(&a), Some(&b)) => bad.push(format!(
                "{}: chi > 0 on [{a:.4}, {b:.4}], not inside (0, 1)",
                p.label
            )),
            _ => bad.push(format!("{}: chi vanishes everywhere", p.label)),
        }
    }
    out.push(check(
        "chi-compact-support",
        bad,
        "support strictly inside (0, 1)",
    ));

    let mut bad = Vec::new();
    for p in &pops {
        let h = 1e-5;
        let worst = grid(-0.2, 1.2, 140_000)
            .map(|x| (p.chi.eval(x + h) - p.chi.eval(x)).abs() / h)
            .fold(0.0, f64::max);
        if !(worst <= p.chi.lipschitz() * (1.0 + 1e-6)) {
            bad.push(format!(
                "{}: slope {worst:.3} exceeds {:.3}",
                p.label,
                p.chi.lipschitz()
            ));
        }
    }
    out.push(check(
        "chi-lipschitz",
        bad,
        "difference quotients within 1/ramp",
    ));

    let hh_pops: Vec<_> = pops.iter().filter(|p| p.membrane.is_hh()).collect();
    let mut bad = Vec::new();
    for p in &pops {
        for v in grid(-120.0, 120.0, 480) {
            for x in [-0.5, -1e-9, 0.0] {
                if p.synapse_drift(v, x) < 0.0 {
                    bad.push(format!("{}: synapse drift < 0 at v={v}, y={x}", p.label));
                }
            }
            for x in [1.0, 1.0 + 1e-9, 1.5] {
                if p.synapse_drift(v, x) > 0.0 {
                    bad.push(format!("{}: synapse drift > 0 at v={v}, y={x}", p.label));
                }
            }
            if p.membrane.is_hh() {
                for g in Gate::ALL {
                    if p.gate_drift(g, v, 0.0) < 0.0 || p.gate_drift(g, v, -0.5) < 0.0 {
                        bad.push(format!("{}: {} drift < 0 at v={v}", p.label, g.name()));
                    }
                    if p.gate_drift(g, v, 1.0) > 0.0 || p.gate_drift(g, v, 1.5) > 0.0 {
                        bad.push(format!("{}: {} drift > 0 at v={v}", p.label, g.name()));
                    }
                }
            }
        }
    }
    out.push(check(
        "boundary-drift-sign",
        bad,
        "inward drift at 0 and 1 for v in [-120, 120]",
    ));

    let mut bad = Vec::new();
    for p in &pops {
        for v in grid(-120.0, 120.0, 240) {
            for x in [-1.0, -0.1, 0.0, 1.0, 1.1, 2.0] {
                if p.synapse_diffusion(v, x) != 0.0 {
                    bad.push(format!("{}: synapse diffusion nonzero at y={x}", p.label));
                }
                if p.membrane.is_hh() && Gate::ALL.iter().any(|&g| p.gate_diffusion(g, v, x) != 0.0)
                {
                    bad.push(format!("{}: gate diffusion nonzero at x={x}", p.label));
                }
            }
        }
    }
    out.push(check(
        "diffusion-support",
        bad,
        "diffusions vanish outside (0, 1)",
    ));

    if hh_pops.is_empty() {
        out.push(skipped(
            "gate-rate-coercivity",
            "no Hodgkin–Huxley population",
        ));
        out.push(skipped(
            "gate-rate-lipschitz",
            "no Hodgkin–Huxley population",
        ));
    } else {
        let mut bad = Vec::new();
        for p in &hh_pops {
            for g in Gate::ALL {
                for v in grid(-200.0, 200.0, 8000) {
                    let (r, z) = p.gates.eval(g, v);
                    let ok = |x: f64| x >= p.gates.clamp_lo && x <= p.gates.clamp_hi;
                    if !ok(r) || !ok(z) {
                        bad.push(format!(
                            "{}: {} rates ({r}, {z}) at v={v}",
                            p.label,
                            g.name()
                        ));
                    }
                    for x in [0.0, 0.5, 1.0] {
                        let radicand = r * (1.0 - x) + z * x;
                        if radicand < p.gates.clamp_lo {
                            bad.push(format!(
                                "{}: {} radicand {radicand} below floor",
                                p.label,
                                g.name()
                            ));
                        }
                    }
                }
            }
        }
        out.push(check(
            "gate-rate-coercivity",
            bad,
            "rates within [clamp_lo, clamp_hi]",
        ));

        let mut bad = Vec::new();
        for p in &hh_pops {
            for g in Gate::ALL {
                let slope = |h: f64| {
                    grid(-200.0, 200.0, (400.0 / h) as usize)
                        .map(|v| {
                            let (a, b) = p.gates.eval(g, v);
                            let (c, d) = p.gates.eval(g, v + h);
                            ((c - a).abs().max((d - b).abs())) / h
                        })
                        .fold(0.0, f64::max)
                };
                let (coarse, fine) = (slope(0.01), slope(0.001));
                // a jump would make the quotient grow like 1/h
                if !(fine.is_finite() && fine <= 2.0 * coarse + 1e-9) {
                    bad.push(format!(
                        "{}: {} quotient {coarse:.3} -> {fine:.3} under refinement",
                        p.label,
                        g.name()
                    ));
                }
            }
        }
        out.push(check(
            "gate-rate-lipschitz",
            bad,
            "difference quotients stable under refinement",
        ));
    }

    let fhn: Vec<_> = pops
        .iter()
        .filter(|p| matches!(p.membrane, MembraneVariant::Fhn { .. }))
        .collect();
    if fhn.is_empty() {
        out.push(skipped(
            "fhn-one-sided-lipschitz",
            "no FitzHugh–Nagumo population",
        ));
    } else {
        let mut bad = Vec::new();
        let mut s = RngStreamKey::network(0, 0, 0, Component::V).stream();
        for p in &fhn {
            for _ in 0..10_000 {
                let (v, u, w) = (5.0 * s.standard(), 5.0 * s.standard(), s.standard());
                let q = Recovery::Fhn { w };
                let lhs = (p.membrane.drift(0.0, v, &q) - p.membrane.drift(0.0, u, &q)) * (v - u);
                if lhs > (v - u).powi(2) * (1.0 + 1e-12) + 1e-12 {
                    bad.push(format!("{}: fails at ({v}, {u})", p.label));
                }
            }
        }
        out.push(check(
            "fhn-one-sided-lipschitz",
            bad,
            "L = 1 on 10^4 random pairs",
        ));
    }

    let mut bad = Vec::new();
    for pc in &cfg.populations {
        let p = &pc.params;
        let y0 = pc.init.y.mean().clamp(0.0, 1.0);
        let test_grid = cfg.grid.truncated(cfg.grid.n_steps.clamp(1, 400));
        let nodes = test_grid.n_nodes();
        let mut s = RngStreamKey::network(1, 0, 0, Component::Y).stream();
        let random: Vec<f64> = (0..nodes).map(|_| p.sigmoid.c_max * s.uniform()).collect();
        for m in [vec![0.0; nodes], vec![p.sigmoid.c_max; nodes], random] {
            match ybar_from_ms(&m, y0, p.a_r, p.a_d, &test_grid) {
                Ok(y) if y.iter().all(|v| (0.0..=1.0).contains(v)) => {}
                Ok(_) => bad.push(format!("{}: closed form left [0, 1]", p.label)),
                Err(e) => bad.push(format!("{}: {e}", p.label)),
            }
        }
    }
    out.push(check("closed-form-range", bad, "E[y] stays in [0, 1]"));
    out
}

fn simulation_properties(spec: &ExperimentSpec) -> Vec<PropertyResult> {
    let mut cfg = spec.network.clone();
    cfg.grid = cfg.grid.truncated(cfg.grid.n_steps.min(200));
    let n_paths = spec.run.n_paths.clamp(2, 8);
    let mut out = Vec::new();
    let opts = EnsembleOptions::new(n_paths);
    let ens = match simulate(&cfg, &opts) {
        Ok(e) => e,
        Err(e) => {
            for name in [
                "confinement",
                "conductance-nonnegative",
                "moments-finite",
                "determinism",
            ] {
                out.push(check(name, vec![format!("simulation failed: {e}")], ""));
            }
            return out;
        }
    };
    let n_cols = ens.columns.len();
    let unit_bad = ens
        .data
        .chunks_exact(n_cols)
        .filter(|r| {
            r[1..2]
                .iter()
                .chain(&r[3..6])
                .any(|x| !x.is_nan() && !(0.0..=1.0).contains(x))
        })
        .count();
    let j_bad = ens
        .data
        .chunks_exact(n_cols)
        .filter(|r| r[6..].iter().any(|&j| !(j >= 0.0)))
        .count();
    let detail = format!("{n_paths} paths x {} steps", cfg.grid.n_steps);
    out.push(check(
        "confinement",
        if unit_bad > 0 {
            vec![format!("{unit_bad} stored states outside [0, 1]")]
        } else {
            vec![]
        },
        format!("y and gates in [0, 1] ({detail})"),
    ));
    out.push(check(
        "conductance-nonnegative",
        if j_bad > 0 {
            vec![format!("{j_bad} stored states with J < 0")]
        } else {
            vec![]
        },
        format!("J >= 0 ({detail})"),
    ));
    let worst = ens.mean_square_v().into_iter().fold(0.0, f64::max);
    out.push(check(
        "moments-finite",
        if worst.is_finite() {
            vec![]
        } else {
            vec!["mean V^2 is not finite".into()]
        },
        format!("max_t mean V^2 = {worst:.4}"),
    ));
    let det = match simulate(&cfg, &opts.sequential()) {
        Ok(b) if b.bit_eq(&ens) => vec![],
        Ok(_) => vec!["parallel and sequential runs differ".into()],
        Err(e) => vec![e.to_string()],
    };
    out.push(check(
        "determinism",
        det,
        "parallel and sequential runs bit-identical",
    ));

    let quiet = presets::without_interaction(cfg.clone());
    let p = quiet.n_populations();
    let nodes = quiet.grid.n_nodes();
    let curve = MeanCurve {
        grid: quiet.grid,
        labels: quiet.labels(),
        m_s: vec![vec![0.0; nodes]; p],
        m_s_se: vec![vec![0.0; nodes]; p],
        y_bar: vec![vec![0.5; nodes]; p],
        config_hash: quiet.hash(),
        seed: quiet.seed,
    };
    let exact = match run_coupled(&quiet, &curve, &CouplingOptions::new(n_paths)) {
        Ok(run) if run.exact.iter().all(|&e| e) && run.estimate().0 == 0.0 => vec![],
        Ok(run) => vec![format!("distance {} without interaction", run.estimate().0)],
        Err(e) => vec![e.to_string()],
    };
    out.push(check(
        "coupling-exactness",
        exact,
        "coupled pair bit-identical without interaction",
    ));
    out
}

/// Runs the invariant suites against the model of `spec`. `issues` are
/// the validation problems found while parsing; any of them fails the
/// `config-valid` property and disables the simulation-based checks.
pub fn validate(spec: &ExperimentSpec, issues: &[ConfigIssue]) -> ValidationReport {
    let mut results = vec![check(
        "config-valid",
        issues.iter().map(ToString::to_string).collect(),
        "all fields within their documented ranges",
    )];
    results.extend(coefficient_properties(&spec.network));
    if issues.is_empty() {
        results.extend(simulation_properties(spec));
    } else {
        for name in [
            "confinement",
            "conductance-nonnegative",
            "moments-finite",
            "determinism",
            "coupling-exactness",
        ] {
            results.push(skipped(name, "configuration invalid"));
        }
    }
    ValidationReport {
        config_hash: spec.network.hash(),
        seed: spec.network.seed,
        results,
    }
}
