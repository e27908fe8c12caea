use crate::error::{Error, Result};
use crate::model::PairParams;

/// Coefficients of `dJ = theta (j_mean - J) dt + sigma_j sqrt(J) dB`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CirParams {
    pub theta: f64,
    pub j_mean: f64,
    pub sigma_j: f64,
}

impl From<&PairParams> for CirParams {
    fn from(p: &PairParams) -> Self {
        Self {
            theta: p.theta,
            j_mean: p.j_mean,
            sigma_j: p.sigma_j,
        }
    }
}

/// Euler–Maruyama step projected onto `[0, 1]`.
#[inline]
pub fn step_euler_confined(x: f64, drift: f64, diffusion: f64, dt: f64, dw: f64) -> Result<f64> {
    let next = x + drift * dt + diffusion * dw;
    if !next.is_finite() {
        return Err(Error::NonFiniteStep("confined"));
    }
    Ok(next.clamp(0.0, 1.0))
}

/// Plain Euler–Maruyama step.
#[inline]
pub fn step_euler_free(x: f64, drift: f64, diffusion: f64, dt: f64, dw: f64) -> Result<f64> {
    let next = x + drift * dt + diffusion * dw;
    if !next.is_finite() {
        return Err(Error::NonFiniteStep("free"));
    }
    Ok(next)
}

/// Full-truncation Euler step for the CIR conductance; never negative.
#[inline]
pub fn step_cir(j: f64, p: &CirParams, dt: f64, dw: f64) -> Result<f64> {
    let jp = j.max(0.0);
    let next = j + p.theta * (p.j_mean - jp) * dt + p.sigma_j * jp.sqrt() * dw;
    if !next.is_finite() {
        return Err(Error::NonFiniteStep("cir"));
    }
    Ok(next.max(0.0))
}
