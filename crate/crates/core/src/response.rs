//! Self-energy, full and local susceptibilities, linewidth and resonance.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate_pv, RootOptions, Tolerance};
use crate::renorm::{bath_breaks, stiffness_shift, Mode, Resonator, ResonatorModel};
use crate::sweep::try_map;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfEnergy {
    pub omega: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Susceptibility {
    pub omega: f64,
    pub value: Complex64,
    pub inverse: Complex64,
}

impl Susceptibility {
    fn from_inverse(omega: f64, inverse: Complex64) -> Self {
        Susceptibility { omega, value: inverse.inv(), inverse }
    }

    fn conj(self) -> Self {
        Susceptibility { omega: -self.omega, value: self.value.conj(), inverse: self.inverse.conj() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSummary {
    pub omega_r: f64,
    pub gamma: f64,
    pub q_factor: f64,
    pub m_r: f64,
    /// |k| γ / Ω_R < 0.05: J varies slowly across the linewidth.
    pub slow_variation_ok: bool,
    /// γ/Ω_R > 0.1: weak-damping formulas are being used outside their range.
    pub strong_damping: bool,
}

const SLOW_VARIATION_LIMIT: f64 = 0.05;
const STRONG_DAMPING_LIMIT: f64 = 0.1;
const LOCAL_WINDOW: f64 = 10.0;

/// (2ω^p/π) PV∫₀^∞ J(x) / (x^{p−1} (x² − ω²)) dx for p = 2 (Re Σ) or p = 4
/// (Re Σ_res). Both integrands are regular at x = 0 because J ~ x³.
pub(crate) fn pv_self_energy(spec: &BathSpec, omega: f64, power: i32, tol: &Tolerance) -> Result<f64> {
    if omega == 0.0 {
        return Ok(0.0);
    }
    let lift = 4 - power;
    let w2 = omega * omega;
    let f = |x: f64| x.powi(lift) * spec.density_over_cube(x) / ((x - omega) * (x + omega));
    let r = integrate_pv(f, omega, 0.0, f64::INFINITY, &bath_breaks(spec), tol)
        .map_err(|e| e.context(format!("self-energy principal value at omega = {omega}")))?;
    Ok(2.0 / PI * w2.powi(power / 2) * r.value)
}

/// Σ(ω) for ω ≥ 0: Re Σ by principal-value quadrature, Im Σ = J(ω).
pub fn self_energy(spec: &BathSpec, omega: f64, tol: &Tolerance) -> Result<SelfEnergy> {
    if !(omega >= 0.0) {
        return Err(Error::domain(format!(
            "self_energy takes omega >= 0 (got {omega}); use the conjugate relation for negative frequencies"
        )));
    }
    Ok(SelfEnergy { omega, re: pv_self_energy(spec, omega, 2, tol)?, im: spec.density(omega) })
}

/// χ⁻¹(ω) = MΩ_0² − Mω² − δK − Σ(ω) for ω ≥ 0.
fn inverse_at(model: &ResonatorModel, omega: f64) -> Result<Complex64> {
    let sigma = self_energy(model.spec(), omega, model.tolerance())?;
    let m = model.mass();
    let w0 = model.omega_0();
    Ok(Complex64::new(m * w0 * w0 - m * omega * omega - model.delta_k() - sigma.re, -sigma.im))
}

/// Full susceptibility; negative frequencies via χ(−ω) = χ*(ω).
pub fn susceptibility(model: &ResonatorModel, omega: f64) -> Result<Susceptibility> {
    if !omega.is_finite() {
        return Err(Error::domain(format!("susceptibility at omega = {omega}")));
    }
    let s = Susceptibility::from_inverse(omega.abs(), inverse_at(model, omega.abs())?);
    Ok(if omega < 0.0 { s.conj() } else { s })
}

/// χ_eff⁻¹ = M_R(Ω_R² − ω²) − iJ(Ω_R), the expansion about the resonance.
pub fn local_susceptibility(model: &ResonatorModel, omega: f64) -> Susceptibility {
    let wr = model.omega_r();
    let gamma = model.gamma();
    if (omega - wr).abs() > LOCAL_WINDOW * gamma {
        log::warn!(
            "local susceptibility at omega = {omega} is {:.1} linewidths from resonance",
            (omega - wr).abs() / gamma
        );
    }
    let inverse = Complex64::new(model.m_r() * (wr * wr - omega * omega), -model.spec().density(wr));
    Susceptibility::from_inverse(omega, inverse)
}

/// γ = J(Ω_R)/(M_R Ω_R) and the derived quality factor.
pub fn linewidth(model: &ResonatorModel) -> ResonanceSummary {
    let omega_r = model.omega_r();
    let gamma = model.gamma();
    let strong_damping = gamma / omega_r > STRONG_DAMPING_LIMIT;
    if strong_damping {
        log::warn!("strong damping: gamma/Omega_R = {:.3e}", gamma / omega_r);
    }
    ResonanceSummary {
        omega_r,
        gamma,
        q_factor: omega_r / gamma,
        m_r: model.m_r(),
        slow_variation_ok: model.spec().k().abs() * gamma / omega_r < SLOW_VARIATION_LIMIT,
        strong_damping,
    }
}

const BRACKET_GROWTH: f64 = 1.25;
const BRACKET_STEPS: usize = 8;

/// Root of Re χ⁻¹(ω) for a resonator given by its bare frequency.
///
/// The search starts on [Ω_0/2, Ω_0]. A negative residual self-energy can
/// push the resonance above Ω_0, so the upper end is widened geometrically
/// until the sign changes.
pub fn resonance_solve(spec: &BathSpec, res: &Resonator, tol: &Tolerance) -> Result<f64> {
    if res.mode() != Mode::Forward {
        return Err(Error::domain("resonance_solve needs a forward-mode resonator"));
    }
    let w0 = res.omega_0().unwrap_or(f64::NAN);
    let m = res.mass();
    let dk = stiffness_shift(spec)?;
    let re_inv = |w: f64| -> Result<f64> { Ok(m * w0 * w0 - m * w * w - dk - pv_self_energy(spec, w, 2, tol)?) };
    let lo = 0.5 * w0;
    let f_lo = re_inv(lo)?;
    let mut hi = w0;
    let mut f_hi = re_inv(hi)?;
    let mut steps = 0;
    while f_lo.signum() == f_hi.signum() && steps < BRACKET_STEPS {
        hi *= BRACKET_GROWTH;
        f_hi = re_inv(hi)?;
        steps += 1;
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { a: lo, b: hi, fa: f_lo, fb: f_hi });
    }
    let opts = RootOptions { x_tol: 1e-13 * w0, ..RootOptions::default() };
    find_root(re_inv, lo, hi, &opts)
}

/// One row of a frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: f64,
    pub re_chi: f64,
    pub im_chi: f64,
    pub re_sigma: f64,
    pub im_sigma: f64,
}

pub const SWEEP_COLUMNS: [&str; 5] = ["omega", "re_chi", "im_chi", "re_sigma", "im_sigma"];

impl SweepRow {
    pub fn values(&self) -> [f64; 5] {
        [self.omega, self.re_chi, self.im_chi, self.re_sigma, self.im_sigma]
    }
}

fn sweep_point(model: &ResonatorModel, omega: f64) -> Result<SweepRow> {
    let w = omega.abs();
    let sigma = self_energy(model.spec(), w, model.tolerance())?;
    let chi = susceptibility(model, omega)?;
    let sign = if omega < 0.0 { -1.0 } else { 1.0 };
    Ok(SweepRow { omega, re_chi: chi.value.re, im_chi: chi.value.im, re_sigma: sigma.re, im_sigma: sign * sigma.im })
}

/// χ and Σ on a grid of frequencies.
pub fn sweep(model: &ResonatorModel, omegas: &[f64]) -> Result<Vec<SweepRow>> {
    try_map(omegas, |&w| sweep_point(model, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renorm::{calibrate_for_quality, mass_shift, residual_self_energy_real};

    fn tol() -> Tolerance {
        Tolerance::new(1e-12, 1e-16).unwrap()
    }

    fn model() -> ResonatorModel {
        let b = calibrate_for_quality(-2.30, 1.0, 1.0, 215.0, &tol()).unwrap();
        ResonatorModel::new(b, Resonator::anchored(1.0, 1.0, 0.0).unwrap(), tol()).unwrap()
    }

    #[test]
    fn self_energy_at_zero_and_small_omega() {
        let b = BathSpec::calibrate(-2.30, 1.0, 1.0).unwrap();
        let s0 = self_energy(&b, 0.0, &tol()).unwrap();
        assert_eq!((s0.re, s0.im), (0.0, 0.0));
        let w = 1e-3;
        let s = self_energy(&b, w, &tol()).unwrap();
        let dm = mass_shift(&b).unwrap();
        assert!((s.re / (w * w) / dm - 1.0).abs() < 1e-4);
        assert!(self_energy(&b, -1.0, &tol()).is_err());
    }

    #[test]
    fn residual_is_self_energy_minus_mass_term() {
        let b = BathSpec::calibrate(-1.75, 1.0, 0.01).unwrap();
        let dm = mass_shift(&b).unwrap();
        for &w in &[0.2, 0.7, 1.0, 1.6, 3.0] {
            let full = self_energy(&b, w, &tol()).unwrap().re;
            let res = residual_self_energy_real(&b, w, &tol()).unwrap();
            assert!((full - dm * w * w - res).abs() < 1e-12 * dm, "w={w}");
        }
    }

    #[test]
    fn small_frequency_exponent() {
        let b = BathSpec::calibrate(-2.30, 1.0, 1.0).unwrap();
        let dm = mass_shift(&b).unwrap();
        let resid = |w: f64| (self_energy(&b, w, &tol()).unwrap().re - dm * w * w).abs();
        let slope = (resid(1e-2).ln() - resid(1e-3).ln()) / (1e-2f64.ln() - 1e-3f64.ln());
        assert!((slope - 4.0).abs() < 0.1, "{slope}");
    }

    #[test]
    fn susceptibility_identities() {
        let m = model();
        let s0 = susceptibility(&m, 0.0).unwrap();
        assert_eq!(s0.inverse.im, 0.0);
        assert!(s0.inverse.re > 0.0);
        for i in 0..20 {
            let w = 0.05 + 0.17 * i as f64;
            let s = susceptibility(&m, w).unwrap();
            let j = m.spec().density(w);
            let expect = j / s.inverse.norm_sqr();
            assert!(((s.value.im - expect) / expect).abs() < 1e-12);
            assert!(((s.value * s.inverse) - 1.0).norm() < 1e-12);
            let n = susceptibility(&m, -w).unwrap();
            assert!((n.value - s.value.conj()).norm() <= 1e-15 * s.value.norm());
        }
    }

    #[test]
    fn local_form_near_resonance() {
        let m = model();
        let g = m.gamma();
        let on = local_susceptibility(&m, 1.0);
        assert_eq!(on.inverse.re, 0.0);
        for i in -4..=4 {
            let w = 1.0 + 0.24 * g * i as f64;
            let full = susceptibility(&m, w).unwrap().value.norm_sqr();
            let local = local_susceptibility(&m, w);
            assert!((local.value.norm_sqr() / full - 1.0).abs() < 0.05, "w={w}");
            let expect = g / m.m_r() / ((1.0 - w * w).powi(2) + g * g);
            assert!((local.value.im / expect - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linewidth_at_q215() {
        let s = linewidth(&model());
        assert!((s.gamma - 1.0 / 215.0).abs() < 1e-11);
        assert!((s.q_factor - 215.0).abs() < 1e-6);
        assert!(s.slow_variation_ok && !s.strong_damping);
        assert!((s.gamma.powi(2) - 2.16e-5).abs() < 1e-7);
    }

    #[test]
    fn forward_round_trip() {
        let m = model();
        let fwd = Resonator::forward(1.0, m.omega_0(), 0.0).unwrap();
        let wr = resonance_solve(m.spec(), &fwd, &tol()).unwrap();
        assert!((wr - 1.0).abs() < 1e-6, "{wr}");
        let fm = ResonatorModel::new(*m.spec(), fwd, tol()).unwrap();
        assert!((fm.omega_r() - 1.0).abs() < 1e-6);
        assert!((fm.m_r() - m.m_r()).abs() < 1e-6);
        assert!(resonance_solve(m.spec(), m.resonator(), &tol()).is_err());
    }

    #[test]
    fn decoupled_resonance_is_bare() {
        let b = BathSpec::calibrate(-2.30, 1.0, 1e-12).unwrap();
        let fwd = Resonator::forward(1.0, 1.3, 0.0).unwrap();
        let wr = resonance_solve(&b, &fwd, &tol()).unwrap();
        assert!((wr - 1.3).abs() < 1e-9);
    }

    #[test]
    fn complex_pole() {
        let m = model();
        let g = m.gamma();
        let w = Complex64::new(1.0, -0.5 * g);
        let inv = m.m_r() * (Complex64::new(1.0, 0.0) - w * w) - Complex64::new(0.0, m.spec().density(1.0));
        assert!(inv.norm() / m.m_r() < 1e-4);
    }

    #[test]
    fn resonance_matches_peak_of_response() {
        let m = model();
        let g = m.gamma();
        let f = |w: f64| -susceptibility(&m, w).unwrap().value.norm_sqr();
        let (mut lo, mut hi) = (1.0 - 2.0 * g, 1.0 + 2.0 * g);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        while hi - lo > 1e-4 * g {
            let (a, b) = (hi - r * (hi - lo), lo + r * (hi - lo));
            if f(a) < f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        assert!((0.5 * (lo + hi) - 1.0).abs() < 0.05 * g);
    }

    #[test]
    fn sweep_rows() {
        let m = model();
        let rows = sweep(&m, &[-1.0, 0.5, 1.0]).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].re_chi, rows[2].re_chi);
        assert_eq!(rows[0].im_chi, -rows[2].im_chi);
        assert!(rows[1].im_sigma > 0.0);
    }
}
