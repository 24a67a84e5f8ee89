//! The structured spectral density J_k(ω) = A_k ω³ [1 + (ω/Ω_R)²]^{k−3}.
//!
//! Cubic in the infrared, ω^{2k−3} in the ultraviolet, with logarithmic slope
//! exactly `k` at the resonance Ω_R. The prefactor is fixed by the value the
//! density takes at Ω_R.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Infrared exponent of the model density.
pub const S_IR: f64 = 3.0;

/// Calibrated bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BathInput", into = "BathInput")]
pub struct BathSpec {
    k: f64,
    omega_r: f64,
    j_res: f64,
    a_k: f64,
}

/// Serialized form of a [`BathSpec`]; the resonance is given in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathInput {
    pub k: f64,
    pub omega_r_hz: f64,
    pub j_res: f64,
}

impl TryFrom<BathInput> for BathSpec {
    type Error = Error;
    fn try_from(input: BathInput) -> Result<Self> {
        BathSpec::calibrate(input.k, 2.0 * PI * input.omega_r_hz, input.j_res)
    }
}

impl From<BathSpec> for BathInput {
    fn from(spec: BathSpec) -> Self {
        BathInput { k: spec.k, omega_r_hz: spec.omega_r / (2.0 * PI), j_res: spec.j_res }
    }
}

impl BathSpec {
    /// Fixes A_k = 2^{3−k} J_res / Ω_R³ so that J_k(Ω_R) = `j_res`.
    pub fn calibrate(k: f64, omega_r: f64, j_res: f64) -> Result<Self> {
        if !k.is_finite() || k >= 1.5 {
            return Err(Error::domain(format!("k = {k}: the ultraviolet exponent 2k - 3 must be negative (k < 3/2)")));
        }
        if !(omega_r > 0.0) || !omega_r.is_finite() {
            return Err(Error::domain(format!("omega_r must be positive, got {omega_r}")));
        }
        if !(j_res > 0.0) || !j_res.is_finite() {
            return Err(Error::domain(format!("j_res must be positive, got {j_res}")));
        }
        let a_k = (3.0 - k).exp2() * j_res / omega_r.powi(3);
        Ok(BathSpec { k, omega_r, j_res, a_k })
    }

    /// Same shape and resonance, different on-resonance value.
    pub fn with_j_res(&self, j_res: f64) -> Result<Self> {
        BathSpec::calibrate(self.k, self.omega_r, j_res)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn omega_r(&self) -> f64 {
        self.omega_r
    }

    pub fn j_res(&self) -> f64 {
        self.j_res
    }

    pub fn a_k(&self) -> f64 {
        self.a_k
    }

    pub fn s_ir(&self) -> f64 {
        S_IR
    }

    pub fn r_uv(&self) -> f64 {
        2.0 * self.k - 3.0
    }

    // Written as J_res x³ [(1 + x²)/2]^{k−3}, equal to the A_k form but exact at x = 1.

    /// J_k(ω) without the domain check; callers guarantee ω ≥ 0.
    #[inline]
    pub(crate) fn density(&self, omega: f64) -> f64 {
        let x = omega / self.omega_r;
        self.j_res * x.powi(3) * (0.5 * (1.0 + x * x)).powf(self.k - 3.0)
    }

    /// J_k(ω)/ω³ = A_k [1 + (ω/Ω_R)²]^{k−3}; regular at ω = 0.
    #[inline]
    pub(crate) fn density_over_cube(&self, omega: f64) -> f64 {
        let x = omega / self.omega_r;
        self.j_res / self.omega_r.powi(3) * (0.5 * (1.0 + x * x)).powf(self.k - 3.0)
    }

    /// One-sided spectral density J_k(ω), ω ≥ 0.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::domain(format!(
                "spectral_density is one-sided; got omega = {omega} (use |omega| for the even extension)"
            )));
        }
        Ok(self.density(omega))
    }

    /// d ln J / d ln ω = 3 + 2(k − 3) x²/(1 + x²), x = ω/Ω_R.
    pub fn log_slope(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0) {
            return Err(Error::domain(format!("log_slope needs omega > 0, got {omega}")));
        }
        let x2 = (omega / self.omega_r).powi(2);
        Ok(3.0 + 2.0 * (self.k - 3.0) * x2 / (1.0 + x2))
    }

    /// Maxima of J_k and of the coupling function c_k.
    pub fn peaks(&self) -> Result<Peaks> {
        if self.k >= 1.0 {
            return Err(Error::domain(format!("coupling function has no interior maximum for k = {} >= 1", self.k)));
        }
        Ok(Peaks {
            omega_j_max: self.omega_r * (3.0 / (3.0 - 2.0 * self.k)).sqrt(),
            omega_c_max: self.omega_r * (2.0 / (1.0 - self.k)).sqrt(),
        })
    }

    /// Coupling function c_k(ω) of a continuum with constant density of
    /// states and modal mass that reproduces J_k.
    pub fn coupling_function(&self, profile: &MicroscopicProfile, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::domain(format!("coupling_function needs omega >= 0, got {omega}")));
        }
        let x = omega / self.omega_r;
        let norm = ((4.0 - self.k).exp2() * profile.m_modal() * self.j_res
            / (PI * profile.rho() * self.omega_r.powi(3)))
        .sqrt();
        Ok(omega * omega * norm * (1.0 + x * x).powf(0.5 * (self.k - 3.0)))
    }

    /// Finiteness of the renormalizations and variances for this bath.
    pub fn admissibility(&self) -> AdmissibilityReport {
        admissibility(S_IR, self.r_uv())
    }
}

/// Peak frequencies of J_k and c_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peaks {
    pub omega_j_max: f64,
    pub omega_c_max: f64,
}

/// Constant density of states ρ̃ and modal mass m̃ of the bath continuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroscopicProfile {
    rho: f64,
    m_modal: f64,
}

impl MicroscopicProfile {
    pub fn new(rho: f64, m_modal: f64) -> Result<Self> {
        if !(rho > 0.0) || !(m_modal > 0.0) || !rho.is_finite() || !m_modal.is_finite() {
            return Err(Error::domain(format!(
                "density of states and modal mass must be positive (rho = {rho}, m = {m_modal})"
            )));
        }
        Ok(MicroscopicProfile { rho, m_modal })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn m_modal(&self) -> f64 {
        self.m_modal
    }
}

/// Which bath-induced quantities are finite for J ~ ω^s (IR), ω^r (UV).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub delta_k_finite: bool,
    pub delta_m_finite: bool,
    pub sigma_q_finite: bool,
    pub sigma_p_finite: bool,
    pub stable: bool,
}

/// ∫J/ω converges for s > 0, r < 0; ∫J/ω³ for s > 2, r < 2. The variances
/// weigh Im χ ~ J at low and J/ω⁴ at high frequency by coth ~ 1/ω, and the
/// momentum variance carries an extra ω².
pub fn admissibility(s: f64, r: f64) -> AdmissibilityReport {
    let delta_k_finite = s > 0.0 && r < 0.0;
    let delta_m_finite = s > 2.0 && r < 2.0;
    let sigma_q_finite = s > 0.0 && r < 3.0;
    let sigma_p_finite = s > -2.0 && r < 1.0;
    AdmissibilityReport {
        delta_k_finite,
        delta_m_finite,
        sigma_q_finite,
        sigma_p_finite,
        stable: delta_k_finite && delta_m_finite && sigma_q_finite && sigma_p_finite,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_bath() -> BathSpec {
        BathSpec::calibrate(-2.30, 1.0, 1.0).unwrap()
    }

    #[test]
    fn calibration_prefactor() {
        let b = reference_bath();
        assert!((b.a_k() - 2f64.powf(5.3)).abs() < 1e-12);
        assert!((b.a_k() - 39.396_621_227_037_93).abs() < 1e-9);
        let b0 = BathSpec::calibrate(0.0, 1.0, 1.0).unwrap();
        assert_eq!(b0.a_k(), 8.0);
        let w = 2.0 * PI * 0.914e6;
        let b = BathSpec::calibrate(-2.30, w, 3.7e-4).unwrap();
        let j = b.spectral_density(w).unwrap();
        assert!(((j - 3.7e-4) / 3.7e-4).abs() < 1e-13);
    }

    #[test]
    fn calibration_errors() {
        assert!(BathSpec::calibrate(1.5, 1.0, 1.0).is_err());
        assert!(BathSpec::calibrate(-2.3, 0.0, 1.0).is_err());
        assert!(BathSpec::calibrate(-2.3, 1.0, -1.0).is_err());
        assert!(BathSpec::calibrate(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn density_values() {
        let b = reference_bath();
        assert_eq!(b.spectral_density(0.0).unwrap(), 0.0);
        assert_eq!(b.spectral_density(1.0).unwrap(), 1.0);
        assert!(b.spectral_density(-1.0).is_err());
        let j2 = b.spectral_density(2.0).unwrap();
        let direct = b.a_k() * 8.0 * 5f64.powf(-5.3);
        assert!(((j2 - direct) / direct).abs() < 1e-14);
        // against the ultraviolet power law the ratio is (1 + Ω_R²/ω²)^{k−3}
        let uv = b.a_k() * 2f64.powf(-7.6);
        assert!((j2 / uv - 0.8f64.powf(5.3)).abs() < 1e-14);
        let w: f64 = 3.2;
        let uv = b.a_k() * w.powf(-7.6);
        assert!((b.density(w) / uv - 1.0).abs() < 0.4);
    }

    #[test]
    fn slopes_across_the_linewidth_scale() {
        let b = BathSpec::calibrate(-2.30, 2.0 * PI * 0.914e6, 1.0).unwrap();
        let lo = b.log_slope(2.0 * PI * 0.885e6).unwrap();
        let hi = b.log_slope(2.0 * PI * 0.945e6).unwrap();
        assert!((lo + 2.13).abs() < 0.005, "{lo}");
        assert!((hi + 2.48).abs() < 0.005, "{hi}");
        assert_eq!(b.log_slope(b.omega_r()).unwrap(), -2.30);
        assert!(b.log_slope(0.0).is_err());
    }

    #[test]
    fn slope_matches_finite_difference() {
        let b = reference_bath();
        for &w in &[0.05, 0.5, 1.3, 7.0] {
            let h = 1e-5;
            let fd =
                (b.density(w * (1.0 + h)).ln() - b.density(w * (1.0 - h)).ln()) / ((1.0 + h).ln() - (1.0 - h).ln());
            assert!((fd - b.log_slope(w).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn peak_positions() {
        let p = reference_bath().peaks().unwrap();
        assert!((p.omega_j_max - (3.0f64 / 7.6).sqrt()).abs() < 1e-15);
        assert!((p.omega_j_max - 0.6283).abs() < 1e-4);
        assert!((p.omega_c_max - 0.7785).abs() < 1e-4);
        assert!(BathSpec::calibrate(1.2, 1.0, 1.0).unwrap().peaks().is_err());
        for k in [-3.35, -2.3, -1.75, -1.25] {
            let p = BathSpec::calibrate(k, 1.0, 1.0).unwrap().peaks().unwrap();
            assert!(p.omega_j_max < 1.0 && p.omega_c_max < 1.0);
        }
        // J peaks below resonance for any negative slope; c_k only once k < -1
        for k in [-0.9, -0.5, -0.01] {
            let p = BathSpec::calibrate(k, 1.0, 1.0).unwrap().peaks().unwrap();
            assert!(p.omega_j_max < 1.0 && p.omega_c_max > 1.0);
        }
    }

    #[test]
    fn coupling_reproduces_density() {
        let b = reference_bath();
        let prof = MicroscopicProfile::new(3.2, 0.7).unwrap();
        assert_eq!(b.coupling_function(&prof, 0.0).unwrap(), 0.0);
        for i in 1..=50 {
            let w = 0.07 * i as f64;
            let c = b.coupling_function(&prof, w).unwrap();
            let j = 0.5 * PI * prof.rho() * c * c / (prof.m_modal() * w);
            assert!(((j - b.density(w)) / b.density(w)).abs() < 1e-13);
        }
        assert!(MicroscopicProfile::new(0.0, 1.0).is_err());
    }

    #[test]
    fn coupling_argmax_on_grid() {
        let b = reference_bath();
        let prof = MicroscopicProfile::new(1.0, 1.0).unwrap();
        let peak = b.peaks().unwrap().omega_c_max;
        // coarse grid, then a golden-section refinement of the bracketing cell
        let n = 20_000;
        let grid: Vec<f64> = (1..n).map(|i| 3.0 * i as f64 / n as f64).collect();
        let c = |w: f64| b.coupling_function(&prof, w).unwrap();
        let best = grid.iter().copied().fold(0.0, |acc, w| if c(w) > c(acc) { w } else { acc });
        let (mut lo, mut hi) = (best - 3.0 / n as f64, best + 3.0 / n as f64);
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        while hi - lo > 1e-10 {
            let m1 = hi - ratio * (hi - lo);
            let m2 = lo + ratio * (hi - lo);
            if c(m1) < c(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        assert!((0.5 * (lo + hi) / peak - 1.0).abs() < 1e-6);
    }

    #[test]
    fn admissibility_table() {
        let all = reference_bath().admissibility();
        assert!(all.delta_k_finite && all.delta_m_finite && all.sigma_q_finite && all.sigma_p_finite);
        assert!(all.stable);
        let ohmic = admissibility(1.0, 1.0);
        assert!(!ohmic.delta_m_finite && !ohmic.stable);
        let naive = admissibility(-2.3, -2.3);
        assert!(!naive.delta_k_finite);
    }

    #[test]
    fn json_round_trip() {
        let b = BathSpec::calibrate(-2.30, 2.0 * PI * 0.914e6, 2.5e-3).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert!(s.contains("omega_r_hz"));
        let back: BathSpec = serde_json::from_str(&s).unwrap();
        assert!((back.omega_r() / b.omega_r() - 1.0).abs() < 1e-15);
        assert!((back.a_k() / b.a_k() - 1.0).abs() < 1e-14);
        let bad: std::result::Result<BathSpec, _> =
            serde_json::from_str(r#"{"k": 2.0, "omega_r_hz": 1.0, "j_res": 1.0}"#);
        assert!(bad.is_err());
    }

    proptest! {
        #[test]
        fn non_negative(k in -3.35f64..-1.25, w in 0.0f64..1e3, wr in 0.1f64..10.0, j in 1e-6f64..10.0) {
            let b = BathSpec::calibrate(k, wr, j).unwrap();
            prop_assert!(b.spectral_density(w).unwrap() >= 0.0);
        }

        #[test]
        fn slope_at_resonance_is_k(k in -3.35f64..-1.25, wr in 1e-3f64..1e7) {
            let b = BathSpec::calibrate(k, wr, 1.0).unwrap();
            prop_assert!((b.log_slope(wr).unwrap() - k).abs() < 1e-12);
        }

        #[test]
        fn unimodal(k in -3.35f64..-1.25) {
            let b = BathSpec::calibrate(k, 1.0, 1.0).unwrap();
            let peak = b.peaks().unwrap().omega_j_max;
            let n = 10_000;
            let mut prev = 0.0;
            for i in 1..=n {
                let w = 5.0 * i as f64 / n as f64;
                let j = b.density(w);
                if w < peak {
                    prop_assert!(j > prev);
                } else if w - 5.0 / n as f64 > peak {
                    prop_assert!(j < prev);
                }
                prev = j;
            }
        }

        #[test]
        fn asymptotes(k in -3.35f64..-1.25) {
            let b = BathSpec::calibrate(k, 1.0, 1.0).unwrap();
            let w: f64 = 1e-4;
            prop_assert!((b.density(w) / (b.a_k() * w.powi(3)) - 1.0).abs() < 1e-7);
            let w: f64 = 1e4;
            let uv = b.a_k() * w.powf(2.0 * k - 3.0);
            prop_assert!((b.density(w) / uv - 1.0).abs() < 1e-6);
        }
    }
}
