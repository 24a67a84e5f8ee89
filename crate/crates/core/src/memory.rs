//! The dissipation kernel μ_k(t) = (2/π)∫₀^∞ J(ω)/ω cos(ωt) dω and the
//! noise kernel.
//!
//! For the model density the transform is a difference of two Bessel terms,
//! μ_k(t) = (2A_kΩ_R^{6−2k}/√π) [B_k(t) − D_k(t)] with
//! B_k = (t/2Ω_R)^{3/2−k} K_{3/2−k}(Ω_R t)/Γ(2−k) and
//! D_k = Ω_R² (t/2Ω_R)^{5/2−k} K_{5/2−k}(Ω_R t)/Γ(3−k).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::numerics::{bessel_k, bessel_k_scaled, cosine_transform_with, find_root, gamma_fn, RootOptions, Tolerance};
use crate::renorm::{bath_breaks, stiffness_shift};
use crate::sweep::try_map;

const SERIES_LIMIT: f64 = 1e-4;
const SCALED_LIMIT: f64 = 30.0;
const ASYMPTOTE_MIN: f64 = 5.0;
const SCAN_STEP: f64 = 0.05;
const SCAN_END: f64 = 50.0;

/// 2A_kΩ_R³/√π, the scale of μ_k used for plotting.
pub fn kernel_normalization(spec: &BathSpec) -> f64 {
    2.0 * spec.a_k() * spec.omega_r().powi(3) / PI.sqrt()
}

/// ln[(z/2)^ν K_ν(z)] for z > 0.
fn ln_pk(nu: f64, z: f64) -> Result<f64> {
    if z > SCALED_LIMIT {
        Ok(nu * (0.5 * z).ln() - z + bessel_k_scaled(nu, z)?.ln())
    } else {
        Ok(nu * (0.5 * z).ln() + bessel_k(nu, z)?.ln())
    }
}

/// (z/2)^ν K_ν(z) near z = 0: Γ(ν)/2 [1 − (z/2)²/(ν − 1)], valid for ν > 2
/// where the next analytic and non-analytic corrections are both O(z⁴).
fn pk_series(nu: f64, z: f64) -> Result<f64> {
    let y = 0.25 * z * z;
    Ok(0.5 * gamma_fn(nu)? * (1.0 - y / (nu - 1.0)))
}

/// The two Bessel terms in units where μ = normalization · (b − d).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParts {
    pub b: f64,
    pub d: f64,
}

/// B_k(t) and D_k(t) scaled by Ω_R^{3−2k} so that μ = kernel_normalization · (b − d).
pub fn kernel_parts(spec: &BathSpec, t: f64) -> Result<KernelParts> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("kernel needs finite t >= 0 (causal), got {t}")));
    }
    let k = spec.k();
    let z = spec.omega_r() * t;
    let (nu1, nu2) = (1.5 - k, 2.5 - k);
    let (g1, g2) = (gamma_fn(2.0 - k)?, gamma_fn(3.0 - k)?);
    let (p1, p2) = if z == 0.0 {
        (0.5 * gamma_fn(nu1)?, 0.5 * gamma_fn(nu2)?)
    } else if z < SERIES_LIMIT && nu1 > 2.0 {
        (pk_series(nu1, z)?, pk_series(nu2, z)?)
    } else {
        (ln_pk(nu1, z)?.exp(), ln_pk(nu2, z)?.exp())
    };
    Ok(KernelParts { b: p1 / g1, d: p2 / g2 })
}

/// μ_k(t) from the Bessel form; μ_k(0) = δK.
pub fn dissipation_kernel(spec: &BathSpec, t: f64) -> Result<f64> {
    if t == 0.0 {
        return stiffness_shift(spec);
    }
    let p = kernel_parts(spec, t)?;
    Ok(kernel_normalization(spec) * (p.b - p.d))
}

/// μ_k(t) by direct cosine-transform quadrature of J(ω)/ω.
pub fn dissipation_kernel_oracle(spec: &BathSpec, t: f64, tol: &Tolerance) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("kernel needs t >= 0 (causal), got {t}")));
    }
    let r = cosine_transform_with(|w| w * w * spec.density_over_cube(w), t, &bath_breaks(spec), tol)
        .map_err(|e| e.context(format!("dissipation-kernel transform at t = {t}")))?;
    Ok(2.0 / PI * r.value)
}

/// d_k in μ_k(t) ≃ −d_k t^{2−k} e^{−Ω_R t}, from the leading large-argument
/// behaviour of the D_k term.
pub fn asymptote_coefficient(spec: &BathSpec) -> Result<f64> {
    let k = spec.k();
    let w = spec.omega_r();
    let pre = 2.0 * spec.a_k() * w.powf(6.0 - 2.0 * k) / PI.sqrt();
    Ok(pre * w * w * (2.0 * w).powf(k - 2.5) * (PI / (2.0 * w)).sqrt() / gamma_fn(3.0 - k)?)
}

/// −d_k t^{2−k} e^{−Ω_R t}, defined for Ω_R t ≥ 5.
pub fn kernel_asymptote(spec: &BathSpec, t: f64) -> Result<f64> {
    let z = spec.omega_r() * t;
    if !(z >= ASYMPTOTE_MIN) {
        return Err(Error::Validity(format!("long-time envelope needs Omega_R t >= {ASYMPTOTE_MIN}, got {z}")));
    }
    Ok(-asymptote_coefficient(spec)? * t.powf(2.0 - spec.k()) * (-z).exp())
}

/// First zero t* of μ_k: scan in steps of 0.05/Ω_R up to 50/Ω_R, then refine.
pub fn kernel_sign_change(spec: &BathSpec) -> Result<f64> {
    let step = SCAN_STEP / spec.omega_r();
    let n = (SCAN_END / SCAN_STEP).round() as usize;
    let mu = |t: f64| dissipation_kernel(spec, t);
    let mut prev_t = 0.0;
    let mut prev = mu(0.0)?;
    for i in 1..=n {
        let t = step * i as f64;
        let cur = mu(t)?;
        if cur == 0.0 {
            return Ok(t);
        }
        if cur.signum() != prev.signum() {
            let opts = RootOptions { x_tol: 1e-14 * t, ..RootOptions::default() };
            return find_root(mu, prev_t, t, &opts);
        }
        prev_t = t;
        prev = cur;
    }
    Err(Error::NotFound(format!("no sign change of the memory kernel below Omega_R t = {SCAN_END}")))
}

/// Thermal weighting of the noise kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    Quantum,
    HighT,
}

/// ω coth(ω/2T); equals 2T at ω = 0 and ω at T = 0.
pub(crate) fn omega_coth(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return omega;
    }
    let y = omega / (2.0 * temperature);
    if y < 1e-6 {
        2.0 * temperature * (1.0 + y * y / 3.0)
    } else {
        omega / y.tanh()
    }
}

/// C_FF(t): (1/π)∫J coth(ω/2T) cos(ωt) dω, or k_BT μ_k(t) in the high-T mode.
pub fn noise_kernel(spec: &BathSpec, temperature: f64, t: f64, mode: NoiseMode, tol: &Tolerance) -> Result<f64> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::domain(format!("temperature must be >= 0, got {temperature}")));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("kernel needs t >= 0 (causal), got {t}")));
    }
    match mode {
        NoiseMode::HighT => {
            if temperature == 0.0 {
                return Err(Error::domain("high-temperature noise kernel needs T > 0"));
            }
            Ok(temperature * dissipation_kernel(spec, t)?)
        }
        NoiseMode::Quantum => {
            // J coth = (J/ω) · ω coth, both factors regular at ω = 0
            let f = |w: f64| w * w * spec.density_over_cube(w) * omega_coth(w, temperature);
            let r = cosine_transform_with(f, t, &bath_breaks(spec), tol)
                .map_err(|e| e.context(format!("noise-kernel transform at t = {t}")))?;
            Ok(r.value / PI)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    Bessel,
    Quadrature,
    Asymptote,
}

impl KernelMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelMethod::Bessel => "bessel",
            KernelMethod::Quadrature => "quadrature",
            KernelMethod::Asymptote => "asymptote",
        }
    }
}

/// μ_k sampled on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub method: KernelMethod,
    pub spec: BathSpec,
}

pub const KERNEL_COLUMNS: [&str; 3] = ["t_omega_r", "mu_normalized", "method"];

impl KernelTrace {
    /// Evaluates μ_k at `times` (strictly increasing, ≥ 0).
    pub fn compute(spec: &BathSpec, times: &[f64], method: KernelMethod, tol: &Tolerance) -> Result<Self> {
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("kernel trace times must be strictly increasing"));
        }
        let values = try_map(times, |&t| match method {
            KernelMethod::Bessel => dissipation_kernel(spec, t),
            KernelMethod::Quadrature => dissipation_kernel_oracle(spec, t, tol),
            KernelMethod::Asymptote => kernel_asymptote(spec, t),
        })?;
        Ok(KernelTrace { times: times.to_vec(), values, method, spec: *spec })
    }

    /// Rows (Ω_R t, μ/(2A_kΩ_R³/√π)).
    pub fn normalized(&self) -> Vec<(f64, f64)> {
        let norm = kernel_normalization(&self.spec);
        let w = self.spec.omega_r();
        self.times.iter().zip(&self.values).map(|(t, v)| (t * w, v / norm)).collect()
    }
}
