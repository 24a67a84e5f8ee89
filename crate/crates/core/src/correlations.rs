//! Symmetrized equilibrium correlations of position and momentum from the
//! fluctuation-dissipation theorem, their pole approximation and the
//! memory-kernel tail.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::{dissipation_kernel, omega_coth};
use crate::numerics::{cosine_transform_with, Tolerance};
use crate::renorm::{bath_breaks, ResonatorModel};
use crate::response::susceptibility;
use crate::sweep::{linspace, try_map};

/// Half-width of the dedicated resonance panel, in linewidths.
const PEAK_HALF_WIDTH: f64 = 10.0;
const PEAK_SUBDIVISIONS: usize = 200;
const TAIL_MIN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    /// coth(ω/2k_BT) weighting.
    FullQuantum,
    /// coth(ω/2k_BT) → 2k_BT/ω.
    HighT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Observable {
    Position,
    Momentum,
}

/// Panel boundaries: the bath scale plus a finely divided window around Ω_R.
fn correlation_breaks(model: &ResonatorModel) -> Vec<f64> {
    let wr = model.omega_r();
    let half = PEAK_HALF_WIDTH * model.gamma();
    let mut breaks = bath_breaks(model.spec());
    breaks.extend(linspace((wr - half).max(0.5 * wr), wr + half, PEAK_SUBDIVISIONS + 1));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

fn transform(model: &ResonatorModel, t: f64, mode: CorrelationMode, obs: Observable, tol: &Tolerance) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("correlations need finite t >= 0, got {t}")));
    }
    let temp = model.temperature();
    if mode == CorrelationMode::HighT && !(temp > 0.0) {
        return Err(Error::domain("high-temperature correlations need T > 0"));
    }
    let spec = model.spec();
    let lift = match obs {
        Observable::Position => 0,
        Observable::Momentum => 2,
    };
    // Im χ = J/|χ⁻¹|² and the thermal factor are split as (J/ω)(ω coth) so
    // that each piece is regular at ω = 0
    let integrand = |w: f64| -> f64 {
        if w == 0.0 {
            return 0.0;
        }
        let inv = match susceptibility(model, w) {
            Ok(s) => s.inverse.norm_sqr(),
            Err(_) => return f64::NAN,
        };
        let j_over_w = w * w * spec.density_over_cube(w);
        let thermal = match mode {
            CorrelationMode::FullQuantum => omega_coth(w, temp),
            CorrelationMode::HighT => 2.0 * temp,
        };
        w.powi(lift) * j_over_w * thermal / inv
    };
    let name = match obs {
        Observable::Position => "position",
        Observable::Momentum => "momentum",
    };
    let r = cosine_transform_with(integrand, t, &correlation_breaks(model), tol)
        .map_err(|e| e.context(format!("{name} correlation transform at t = {t}")))?;
    if !r.value.is_finite() {
        return Err(Error::NonConvergence {
            what: format!("{name} correlation transform at t = {t} (self-energy failed inside)"),
            evaluations: r.evaluations,
            estimate: r.value,
            abs_error: r.abs_error_estimate,
        });
    }
    let mass2 = match obs {
        Observable::Position => 1.0,
        Observable::Momentum => model.mass().powi(2),
    };
    Ok(mass2 * r.value / PI)
}

/// C_QQ(t) = (1/π)∫ coth(ω/2k_BT) Im χ(ω) cos(ωt) dω, or the high-T form.
pub fn position_correlation(model: &ResonatorModel, t: f64, mode: CorrelationMode, tol: &Tolerance) -> Result<f64> {
    transform(model, t, mode, Observable::Position, tol)
}

/// C_PP(t) = (M²/π)∫ ω² coth(ω/2k_BT) Im χ(ω) cos(ωt) dω, or the high-T form.
pub fn momentum_correlation(model: &ResonatorModel, t: f64, mode: CorrelationMode, tol: &Tolerance) -> Result<f64> {
    transform(model, t, mode, Observable::Momentum, tol)
}

/// (σ_Q², σ_P²): the full quantum correlations at t = 0.
pub fn variances(model: &ResonatorModel, tol: &Tolerance) -> Result<(f64, f64)> {
    Ok((
        position_correlation(model, 0.0, CorrelationMode::FullQuantum, tol)?,
        momentum_correlation(model, 0.0, CorrelationMode::FullQuantum, tol)?,
    ))
}

/// Thermal occupation n_R of the resonance.
pub fn occupation(model: &ResonatorModel) -> f64 {
    let temp = model.temperature();
    if temp == 0.0 {
        0.0
    } else {
        1.0 / (model.omega_r() / temp).exp_m1()
    }
}

/// Single-pole forms of (C_QQ, C_PP).
pub fn pole_correlations(model: &ResonatorModel, t: f64) -> (f64, f64) {
    let wr = model.omega_r();
    // 2n_R + 1 = coth(Ω_R/2k_BT), finite at T = 0
    let two_n_plus_one = omega_coth(wr, model.temperature()) / wr;
    let shape = (-0.5 * model.gamma() * t).exp() * (wr * t).cos();
    let cqq = two_n_plus_one / (2.0 * model.m_r() * wr) * shape;
    let cpp = model.mass().powi(2) * wr * two_n_plus_one / (2.0 * model.m_r()) * shape;
    (cqq, cpp)
}

/// δC_QQ(t) = (k_BT/D_*) μ_k(t), D_* = M_R²Ω_R⁴, for Ω_R t ≥ 5.
pub fn memory_tail(model: &ResonatorModel, t: f64) -> Result<f64> {
    let wr = model.omega_r();
    if !(wr * t >= TAIL_MIN) {
        return Err(Error::Validity(format!("memory tail needs Omega_R t >= {TAIL_MIN}, got {}", wr * t)));
    }
    if !(model.temperature() > 0.0) {
        return Err(Error::domain("memory tail is a high-temperature form; T must be positive"));
    }
    let d_star = model.m_r().powi(2) * wr.powi(4);
    Ok(model.temperature() / d_star * dissipation_kernel(model.spec(), t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMethod {
    FullQuantum,
    HighT,
    Pole,
    MemoryTail,
}

impl CorrelationMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CorrelationMethod::FullQuantum => "full_quantum",
            CorrelationMethod::HighT => "high_t",
            CorrelationMethod::Pole => "pole",
            CorrelationMethod::MemoryTail => "memory_tail",
        }
    }
}

/// Correlations on a time grid. The memory-tail method has no momentum
/// counterpart; its `cpp` entries are NaN.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTrace {
    pub times: Vec<f64>,
    pub cqq: Vec<f64>,
    pub cpp: Vec<f64>,
    pub method: CorrelationMethod,
}

pub const CORRELATION_COLUMNS: [&str; 4] = ["t_omega_r", "cqq", "cpp", "method"];

impl CorrelationTrace {
    pub fn compute(model: &ResonatorModel, times: &[f64], method: CorrelationMethod, tol: &Tolerance) -> Result<Self> {
        let pairs = try_map(times, |&t| -> Result<(f64, f64)> {
            match method {
                CorrelationMethod::FullQuantum | CorrelationMethod::HighT => {
                    let mode = if method == CorrelationMethod::HighT {
                        CorrelationMode::HighT
                    } else {
                        CorrelationMode::FullQuantum
                    };
                    Ok((position_correlation(model, t, mode, tol)?, momentum_correlation(model, t, mode, tol)?))
                }
                CorrelationMethod::Pole => Ok(pole_correlations(model, t)),
                CorrelationMethod::MemoryTail => Ok((memory_tail(model, t)?, f64::NAN)),
            }
        })?;
        let (cqq, cpp) = pairs.into_iter().unzip();
        Ok(CorrelationTrace { times: times.to_vec(), cqq, cpp, method })
    }
}
