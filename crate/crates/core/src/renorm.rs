//! Stiffness and mass shifts, the dressed mass M_R and the bare frequency.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::numerics::{gamma_fn, integrate_semi_infinite_with, Tolerance};
use crate::response::{pv_self_energy, resonance_solve};

/// Which resonator frequency is the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The observed resonance Ω_R is given; Ω_0 is inferred.
    Anchored,
    /// The bare frequency Ω_0 is given; Ω_R is solved for.
    Forward,
}

/// Bare mechanical parameters. `temperature` is k_BT in frequency units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonator {
    mass: f64,
    omega_r: Option<f64>,
    omega_0: Option<f64>,
    temperature: f64,
    mode: Mode,
}

impl Resonator {
    pub fn anchored(mass: f64, omega_r: f64, temperature: f64) -> Result<Self> {
        Self::check(mass, omega_r, temperature)?;
        Ok(Resonator { mass, omega_r: Some(omega_r), omega_0: None, temperature, mode: Mode::Anchored })
    }

    pub fn forward(mass: f64, omega_0: f64, temperature: f64) -> Result<Self> {
        Self::check(mass, omega_0, temperature)?;
        Ok(Resonator { mass, omega_r: None, omega_0: Some(omega_0), temperature, mode: Mode::Forward })
    }

    fn check(mass: f64, freq: f64, temperature: f64) -> Result<()> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::domain(format!("mass must be positive, got {mass}")));
        }
        if !(freq > 0.0) || !freq.is_finite() {
            return Err(Error::domain(format!("frequency must be positive, got {freq}")));
        }
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::domain(format!("temperature must be >= 0, got {temperature}")));
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega_r(&self) -> Option<f64> {
        self.omega_r
    }

    pub fn omega_0(&self) -> Option<f64> {
        self.omega_0
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        let freq = self.omega_r.or(self.omega_0).unwrap_or(f64::NAN);
        Self::check(self.mass, freq, temperature)?;
        Ok(Resonator { temperature, ..*self })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormResult {
    pub delta_k: f64,
    pub delta_m: f64,
    pub m_r: f64,
    pub omega_0: f64,
    pub method: Method,
}

/// δK = A_k Ω_R³ Γ(3/2 − k) / (2√π Γ(3 − k)).
pub fn stiffness_shift(spec: &BathSpec) -> Result<f64> {
    let k = spec.k();
    Ok(spec.a_k() * spec.omega_r().powi(3) * gamma_fn(1.5 - k)? / (2.0 * PI.sqrt() * gamma_fn(3.0 - k)?))
}

/// δM = A_k Ω_R Γ(5/2 − k) / (√π Γ(3 − k)).
pub fn mass_shift(spec: &BathSpec) -> Result<f64> {
    let k = spec.k();
    Ok(spec.a_k() * spec.omega_r() * gamma_fn(2.5 - k)? / (PI.sqrt() * gamma_fn(3.0 - k)?))
}

/// Panel boundaries on the bath's own frequency scale.
pub(crate) fn bath_breaks(spec: &BathSpec) -> Vec<f64> {
    let w = spec.omega_r();
    [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|f| f * w).collect()
}

/// (2/π)∫J/ω and (2/π)∫J/ω³ by direct quadrature.
fn shifts_by_quadrature(spec: &BathSpec, tol: &Tolerance) -> Result<(f64, f64)> {
    let breaks = bath_breaks(spec);
    let dk = integrate_semi_infinite_with(|w| w * w * spec.density_over_cube(w), &breaks, tol)
        .map_err(|e| e.context("stiffness-shift quadrature"))?;
    let dm = integrate_semi_infinite_with(|w| spec.density_over_cube(w), &breaks, tol)
        .map_err(|e| e.context("mass-shift quadrature"))?;
    Ok((2.0 / PI * dk.value, 2.0 / PI * dm.value))
}

/// Re Σ_res(ω) = Re Σ(ω) − δM ω², evaluated through its own ω⁴ kernel
/// (2ω⁴/π) PV∫ J(x) / (x³ (x² − ω²)) dx so that no δM ω² is subtracted.
pub fn residual_self_energy_real(spec: &BathSpec, omega: f64, tol: &Tolerance) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::domain(format!("residual self-energy needs omega >= 0, got {omega}")));
    }
    pv_self_energy(spec, omega, 4, tol)
}

const DERIVATIVE_STEP: f64 = 1e-4;
const DERIVATIVE_AGREEMENT: f64 = 1e-5;

/// d Re Σ_res / d(ω²) at ω² = u by central differences with one Richardson step.
fn residual_slope(spec: &BathSpec, omega_r: f64, tol: &Tolerance) -> Result<f64> {
    let u = omega_r * omega_r;
    let h = DERIVATIVE_STEP * u;
    // the differences amplify quadrature noise by u/h; evaluate tighter
    let inner = Tolerance { rel: (tol.rel * 1e-2).max(1e-14), abs: tol.abs * 1e-4, max_evals: tol.max_evals };
    let f = |v: f64| residual_self_energy_real(spec, v.sqrt(), &inner);
    let central = |step: f64| -> Result<f64> { Ok((f(u + step)? - f(u - step)?) / (2.0 * step)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    if (fine - coarse).abs() > DERIVATIVE_AGREEMENT * fine.abs().max(coarse.abs()) {
        return Err(Error::DerivativeUnstable { coarse, fine });
    }
    Ok((4.0 * fine - coarse) / 3.0)
}

/// M_R = M + δM + d Re Σ_res/d(ω²) at Ω_R.
pub fn dressed_mass(spec: &BathSpec, res: &Resonator, tol: &Tolerance) -> Result<f64> {
    let omega_r = match res.mode() {
        Mode::Anchored => res.omega_r().unwrap_or(spec.omega_r()),
        Mode::Forward => resonance_solve(spec, res, tol)?,
    };
    dressed_mass_at(spec, res.mass(), omega_r, mass_shift(spec)?, tol)
}

fn dressed_mass_at(spec: &BathSpec, mass: f64, omega_r: f64, delta_m: f64, tol: &Tolerance) -> Result<f64> {
    let m_r = mass + delta_m + residual_slope(spec, omega_r, tol)?;
    if !(m_r > 0.0) {
        return Err(Error::Instability(format!("dressed mass M_R = {m_r} is not positive")));
    }
    Ok(m_r)
}

/// Ω_0² = (1 + δM/M) Ω_R² + δK/M + Re Σ_res(Ω_R)/M, for an anchored resonator.
pub fn bare_frequency(spec: &BathSpec, res: &Resonator, tol: &Tolerance) -> Result<f64> {
    let omega_r = res.omega_r().ok_or_else(|| Error::domain("bare_frequency needs an anchored resonator"))?;
    bare_from(spec, res.mass(), omega_r, stiffness_shift(spec)?, mass_shift(spec)?, tol)
}

fn bare_from(spec: &BathSpec, mass: f64, omega_r: f64, dk: f64, dm: f64, tol: &Tolerance) -> Result<f64> {
    let sigma = residual_self_energy_real(spec, omega_r, tol)?;
    let w2 = (1.0 + dm / mass) * omega_r * omega_r + dk / mass + sigma / mass;
    if !(w2 > 0.0) {
        return Err(Error::Instability(format!("inferred bare frequency squared is {w2}")));
    }
    Ok(w2.sqrt())
}

fn assemble(
    spec: &BathSpec,
    res: &Resonator,
    dk: f64,
    dm: f64,
    method: Method,
    tol: &Tolerance,
) -> Result<RenormResult> {
    let (omega_r, omega_0) = match res.mode() {
        Mode::Anchored => {
            let wr = res.omega_r().unwrap_or(spec.omega_r());
            (wr, bare_from(spec, res.mass(), wr, dk, dm, tol)?)
        }
        Mode::Forward => (resonance_solve(spec, res, tol)?, res.omega_0().unwrap_or(f64::NAN)),
    };
    let m_r = dressed_mass_at(spec, res.mass(), omega_r, dm, tol)?;
    Ok(RenormResult { delta_k: dk, delta_m: dm, m_r, omega_0, method })
}

/// All renormalized quantities with δK and δM in closed form.
pub fn renormalize(spec: &BathSpec, res: &Resonator, tol: &Tolerance) -> Result<RenormResult> {
    assemble(spec, res, stiffness_shift(spec)?, mass_shift(spec)?, Method::ClosedForm, tol)
}

/// Same as [`renormalize`] with δK and δM integrated numerically.
pub fn renorm_oracle(spec: &BathSpec, res: &Resonator, tol: &Tolerance) -> Result<RenormResult> {
    let (dk, dm) = shifts_by_quadrature(spec, tol)?;
    assemble(spec, res, dk, dm, Method::Quadrature, tol)
}

const Q_ITER_TOL: f64 = 1e-10;
const Q_MAX_ITER: usize = 50;

/// Finds J(Ω_R) such that γ = J(Ω_R)/(M_R Ω_R) equals Ω_R/Q. M_R itself grows
/// linearly with J(Ω_R), so the map J ↦ M_R(J) Ω_R²/Q is iterated to a fixed point.
pub fn calibrate_for_quality(k: f64, omega_r: f64, mass: f64, q: f64, tol: &Tolerance) -> Result<BathSpec> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::domain(format!("quality factor must be positive, got {q}")));
    }
    let mut j = mass * omega_r * omega_r / q;
    for _ in 0..Q_MAX_ITER {
        let spec = BathSpec::calibrate(k, omega_r, j)?;
        let m_r = dressed_mass_at(&spec, mass, omega_r, mass_shift(&spec)?, tol)?;
        let next = m_r * omega_r * omega_r / q;
        if (next - j).abs() <= Q_ITER_TOL * next.abs() {
            return BathSpec::calibrate(k, omega_r, next);
        }
        j = next;
    }
    Err(Error::NonConvergence {
        what: "quality-factor calibration of J(Omega_R)".into(),
        evaluations: Q_MAX_ITER,
        estimate: j,
        abs_error: f64::NAN,
    })
}

/// A resonator with every renormalized quantity resolved once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonatorModel {
    spec: BathSpec,
    resonator: Resonator,
    renorm: RenormResult,
    omega_r: f64,
    tol: Tolerance,
}

impl ResonatorModel {
    pub fn new(spec: BathSpec, resonator: Resonator, tol: Tolerance) -> Result<Self> {
        let renorm = renormalize(&spec, &resonator, &tol)?;
        let omega_r = match resonator.mode() {
            Mode::Anchored => resonator.omega_r().unwrap_or(spec.omega_r()),
            Mode::Forward => resonance_solve(&spec, &resonator, &tol)?,
        };
        let stiffness = resonator.mass() * renorm.omega_0 * renorm.omega_0 - renorm.delta_k;
        if !(stiffness > 0.0) {
            return Err(Error::Instability(format!("M Omega_0^2 - delta_K = {stiffness} is not positive")));
        }
        Ok(ResonatorModel { spec, resonator, renorm, omega_r, tol })
    }

    pub fn spec(&self) -> &BathSpec {
        &self.spec
    }

    pub fn resonator(&self) -> &Resonator {
        &self.resonator
    }

    pub fn renorm(&self) -> &RenormResult {
        &self.renorm
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn mass(&self) -> f64 {
        self.resonator.mass()
    }

    pub fn omega_r(&self) -> f64 {
        self.omega_r
    }

    pub fn omega_0(&self) -> f64 {
        self.renorm.omega_0
    }

    pub fn m_r(&self) -> f64 {
        self.renorm.m_r
    }

    pub fn delta_k(&self) -> f64 {
        self.renorm.delta_k
    }

    pub fn temperature(&self) -> f64 {
        self.resonator.temperature()
    }

    /// γ = J(Ω_R)/(M_R Ω_R).
    pub fn gamma(&self) -> f64 {
        self.spec.density(self.omega_r) / (self.m_r() * self.omega_r)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Ok(ResonatorModel { resonator: self.resonator.with_temperature(temperature)?, ..*self })
    }
}
