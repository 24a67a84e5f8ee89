//! Cavity readout: homodyne transduction, the passive quadrature spectrum,
//! synthetic coherent-drive data and the inversion back to χ, Re Σ and J.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bath::BathSpec;
use crate::error::{Error, Result};
use crate::memory::omega_coth;
use crate::renorm::ResonatorModel;
use crate::response::susceptibility;
use crate::sweep::try_map;

const WEAK_PROBE_LIMIT: f64 = 0.01;
/// Points with |Λ_θ| below this fraction of the grid maximum are dropped.
pub const TRANSDUCTION_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityProbe {
    kappa: f64,
    delta: f64,
    g: f64,
    theta: f64,
}

impl CavityProbe {
    /// `kappa` is the cavity decay rate, `delta` the effective detuning, `g`
    /// the linearized (real) coupling and `theta` the homodyne angle.
    pub fn new(kappa: f64, delta: f64, g: f64, theta: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::domain(format!("cavity decay must be positive, got {kappa}")));
        }
        if !(g >= 0.0) || !g.is_finite() || !delta.is_finite() || !theta.is_finite() {
            return Err(Error::domain(format!("invalid probe: delta = {delta}, g = {g}, theta = {theta}")));
        }
        Ok(CavityProbe { kappa, delta, g, theta })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        CavityProbe::new(self.kappa, self.delta, self.g, theta)
    }

    /// g/κ < 0.01.
    pub fn is_weak(&self) -> bool {
        self.g / self.kappa < WEAK_PROBE_LIMIT
    }
}

/// χ_c(ω) = 1/(κ/2 − i(Δ + ω)).
pub fn cavity_susceptibility(probe: &CavityProbe, omega: f64) -> Complex64 {
    Complex64::new(0.5 * probe.kappa, -(probe.delta + omega)).inv()
}

/// Λ_θ(ω) = i√(κ/2) g [e^{−iθ}χ_c(ω) − e^{iθ}χ_c*(−ω)].
pub fn transduction(probe: &CavityProbe, omega: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, probe.theta);
    let bracket =
        phase.conj() * cavity_susceptibility(probe, omega) - phase * cavity_susceptibility(probe, -omega).conj();
    Complex64::i() * (0.5 * probe.kappa).sqrt() * probe.g * bracket
}

/// Homodyne angle in [0, π) maximizing |Λ_θ(ω)|.
///
/// |e^{−iθ}a − e^{iθ}b|² = |a|² + |b|² − 2 Re(e^{−2iθ} a b*), so the maximum
/// sits where e^{−2iθ} a b* is real and negative.
pub fn optimal_theta(probe: &CavityProbe, omega: f64) -> f64 {
    let a = cavity_susceptibility(probe, omega);
    let b = cavity_susceptibility(probe, -omega).conj();
    let theta = 0.5 * ((a * b.conj()).arg() - std::f64::consts::PI);
    theta.rem_euclid(std::f64::consts::PI)
}

/// Symmetrized force noise S_FF(ω) = J(|ω|) coth(|ω|/2k_BT), with the
/// ω → 0 limit 2k_BT J(ω)/ω → 0.
pub fn force_noise_spectrum(spec: &BathSpec, temperature: f64, omega: f64) -> Result<f64> {
    if !(temperature >= 0.0) || !omega.is_finite() {
        return Err(Error::domain(format!(
            "force noise needs T >= 0 and finite omega, got T = {temperature}, omega = {omega}"
        )));
    }
    let w = omega.abs();
    Ok(w * w * spec.density_over_cube(w) * omega_coth(w, temperature))
}

fn require_weak(probe: &CavityProbe) -> Result<()> {
    if probe.is_weak() {
        Ok(())
    } else {
        Err(Error::Backaction(probe.g / probe.kappa))
    }
}

/// S(ω) = |Λ_θ(ω)|² |χ(ω)|² S_FF(ω) + S_imp.
pub fn passive_spectrum(model: &ResonatorModel, probe: &CavityProbe, s_imp: f64, omega: f64) -> Result<f64> {
    require_weak(probe)?;
    if !(s_imp >= 0.0) {
        return Err(Error::domain(format!("imprecision floor must be >= 0, got {s_imp}")));
    }
    let chi = susceptibility(model, omega)?.value;
    let s_ff = force_noise_spectrum(model.spec(), model.temperature(), omega)?;
    Ok(transduction(probe, omega).norm_sqr() * chi.norm_sqr() * s_ff + s_imp)
}

/// Noiseless phase-locked response Λ_θ(ω) χ(ω) F_ext.
pub fn synth_coherent_response(
    model: &ResonatorModel,
    probe: &CavityProbe,
    f_ext: Complex64,
    omega: f64,
) -> Result<Complex64> {
    require_weak(probe)?;
    Ok(transduction(probe, omega) * susceptibility(model, omega)?.value * f_ext)
}

/// Additive complex Gaussian noise on x_coh with standard deviation
/// `relative`·|x_coh| at each point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementNoise {
    pub relative: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectroscopyRecord {
    pub omega: f64,
    pub lambda_theta: Complex64,
    pub s_xx: f64,
    pub x_coh: Complex64,
    pub f_ext: Complex64,
}

pub const RECORD_COLUMNS: [&str; 6] = ["omega", "re_lambda", "im_lambda", "s_xx", "re_xcoh", "im_xcoh"];

impl SpectroscopyRecord {
    pub fn values(&self) -> [f64; 6] {
        [self.omega, self.lambda_theta.re, self.lambda_theta.im, self.s_xx, self.x_coh.re, self.x_coh.im]
    }
}

/// Passive spectrum and coherent response on a grid. Noise draws are taken
/// in grid order so a seed fixes the whole record set.
pub fn synth_records(
    model: &ResonatorModel,
    probe: &CavityProbe,
    s_imp: f64,
    f_ext: Complex64,
    omegas: &[f64],
    noise: Option<MeasurementNoise>,
) -> Result<Vec<SpectroscopyRecord>> {
    let mut records = try_map(omegas, |&w| -> Result<SpectroscopyRecord> {
        Ok(SpectroscopyRecord {
            omega: w,
            lambda_theta: transduction(probe, w),
            s_xx: passive_spectrum(model, probe, s_imp, w)?,
            x_coh: synth_coherent_response(model, probe, f_ext, w)?,
            f_ext,
        })
    })?;
    if let Some(noise) = noise {
        if !(noise.relative >= 0.0) {
            return Err(Error::domain(format!("noise level must be >= 0, got {}", noise.relative)));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        let scale = noise.relative / std::f64::consts::SQRT_2;
        for r in &mut records {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            r.x_coh += Complex64::new(re, im) * (scale * r.x_coh.norm());
        }
    }
    Ok(records)
}

/// The bare parameters and stiffness convention the inversion is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BareParameters {
    pub mass: f64,
    pub omega_0: f64,
    pub delta_k: f64,
}

impl BareParameters {
    pub fn from_model(model: &ResonatorModel) -> Self {
        BareParameters { mass: model.mass(), omega_0: model.omega_0(), delta_k: model.delta_k() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructedPoint {
    pub omega: f64,
    pub chi: Complex64,
    pub re_sigma: f64,
    pub j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub points: Vec<ReconstructedPoint>,
    /// Frequencies dropped because |Λ_θ| fell below the floor.
    pub dropped: Vec<f64>,
}

pub const RECONSTRUCTION_COLUMNS: [&str; 7] =
    ["omega", "re_chi", "im_chi", "re_sigma", "j_recovered", "j_true", "rel_err"];

impl Reconstruction {
    /// Rows for `RECONSTRUCTION_COLUMNS`, compared against the true bath.
    pub fn rows(&self, spec: &BathSpec) -> Vec<[f64; 7]> {
        self.points
            .iter()
            .map(|p| {
                let truth = spec.density(p.omega.abs()) * p.omega.signum();
                [p.omega, p.chi.re, p.chi.im, p.re_sigma, p.j, truth, ((p.j - truth) / truth).abs()]
            })
            .collect()
    }

    /// d ln J / d ln ω at `omega` from the quadratic through the three
    /// reconstructed points nearest to it (positive frequencies only).
    pub fn log_slope_at(&self, omega: f64) -> Result<f64> {
        let mut pts: Vec<(f64, f64)> =
            self.points.iter().filter(|p| p.omega > 0.0 && p.j > 0.0).map(|p| (p.omega.ln(), p.j.ln())).collect();
        if pts.len() < 3 {
            return Err(Error::NotFound("fewer than three usable reconstructed points".into()));
        }
        let x0 = omega.ln();
        pts.sort_by(|a, b| (a.0 - x0).abs().total_cmp(&(b.0 - x0).abs()));
        let [(xa, ya), (xb, yb), (xc, yc)] = [pts[0], pts[1], pts[2]];
        // derivative of the Lagrange interpolant at x0
        let da = ((x0 - xb) + (x0 - xc)) / ((xa - xb) * (xa - xc));
        let db = ((x0 - xa) + (x0 - xc)) / ((xb - xa) * (xb - xc));
        let dc = ((x0 - xa) + (x0 - xb)) / ((xc - xa) * (xc - xb));
        Ok(ya * da + yb * db + yc * dc)
    }
}

/// χ = x_coh/(Λ_θ F_ext), Re Σ = MΩ_0² − Mω² − δK − Re χ⁻¹, J = −Im χ⁻¹.
pub fn reconstruct(
    probe: &CavityProbe,
    measured: &[SpectroscopyRecord],
    bare: &BareParameters,
) -> Result<Reconstruction> {
    if let Some(r) = measured.iter().find(|r| r.f_ext == Complex64::new(0.0, 0.0)) {
        return Err(Error::ZeroDrive(r.omega));
    }
    let lambdas: Vec<Complex64> = measured.iter().map(|r| transduction(probe, r.omega)).collect();
    let max = lambdas.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let floor = TRANSDUCTION_FLOOR * max;
    let mut points = Vec::with_capacity(measured.len());
    let mut dropped = Vec::new();
    for (r, lambda) in measured.iter().zip(&lambdas) {
        if !(lambda.norm() > floor) {
            dropped.push(r.omega);
            continue;
        }
        let chi = r.x_coh / (lambda * r.f_ext);
        let inv = chi.inv();
        let m = bare.mass;
        points.push(ReconstructedPoint {
            omega: r.omega,
            chi,
            re_sigma: m * bare.omega_0 * bare.omega_0 - m * r.omega * r.omega - bare.delta_k - inv.re,
            j: -inv.im,
        });
    }
    if points.is_empty() && !measured.is_empty() {
        return Err(Error::SingularTransduction(measured.len()));
    }
    if !dropped.is_empty() {
        log::warn!("dropped {} points with vanishing transduction", dropped.len());
    }
    Ok(Reconstruction { points, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::memory::{noise_kernel, NoiseMode};
    use crate::numerics::{cosine_transform_with, Tolerance};
    use crate::renorm::{bath_breaks, calibrate_for_quality, Resonator};
    use crate::response::self_energy;
    use crate::sweep::linspace;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::new(1e-12, 1e-16).unwrap()
    }

    fn model(temp: f64) -> ResonatorModel {
        let b = calibrate_for_quality(-2.30, 1.0, 1.0, 215.0, &tol()).unwrap();
        ResonatorModel::new(b, Resonator::anchored(1.0, 1.0, temp).unwrap(), tol()).unwrap()
    }

    fn probe() -> CavityProbe {
        let p = CavityProbe::new(5.0, -1.0, 1e-3, 0.0).unwrap();
        p.with_theta(optimal_theta(&p, 1.0)).unwrap()
    }

    #[test]
    fn cavity_lorentzian() {
        let p = CavityProbe::new(0.4, 0.3, 0.0, 0.0).unwrap();
        let peak = cavity_susceptibility(&p, -0.3);
        assert!((peak - Complex64::new(5.0, 0.0)).norm() < 1e-14);
        for s in [-1.0, 1.0] {
            let h = cavity_susceptibility(&p, -0.3 + s * 0.2).norm_sqr();
            assert!((h / peak.norm_sqr() - 0.5).abs() < 1e-14);
        }
        assert!(cavity_susceptibility(&p, 1e8).norm() < 1e-7);
        assert!(CavityProbe::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(CavityProbe::new(1.0, 0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn transduction_nulls() {
        let p = CavityProbe::new(2.0, 0.5, 0.0, 0.7).unwrap();
        assert_eq!(transduction(&p, 1.3), Complex64::new(0.0, 0.0));
        let p = CavityProbe::new(2.0, 0.0, 0.1, 0.0).unwrap();
        assert!(transduction(&p, 0.0).norm() < 1e-16);
    }

    #[test]
    fn optimal_theta_beats_a_scan() {
        for &(kappa, delta) in &[(5.0, -1.0), (0.3, 0.2), (2.0, 0.0), (0.05, -1.0)] {
            let p = CavityProbe::new(kappa, delta, 1e-3, 0.0).unwrap();
            let best = optimal_theta(&p, 1.0);
            let at = |th: f64| transduction(&p.with_theta(th).unwrap(), 1.0).norm();
            let scan = (0..2000).map(|i| at(PI * i as f64 / 2000.0)).fold(0.0, f64::max);
            assert!(at(best) >= scan * (1.0 - 1e-12));
            assert!((0.0..PI).contains(&best));
        }
    }

    proptest! {
        #[test]
        fn theta_shift_flips_sign(kappa in 0.01f64..10.0, delta in -3.0f64..3.0, g in 0.0f64..1.0,
                                   theta in -PI..PI, w in -5.0f64..5.0) {
            let p = CavityProbe::new(kappa, delta, g, theta).unwrap();
            let q = p.with_theta(theta + PI).unwrap();
            let (a, b) = (transduction(&p, w), transduction(&q, w));
            prop_assert!((a + b).norm() <= 1e-12 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn force_noise_limits() {
        let b = *model(0.0).spec();
        assert_eq!(force_noise_spectrum(&b, 3.0, 0.0).unwrap(), 0.0);
        let (s_small, s_big) =
            (force_noise_spectrum(&b, 3.0, 1e-6).unwrap(), force_noise_spectrum(&b, 3.0, 1e-3).unwrap());
        assert!(s_small > 0.0 && ((s_small / s_big) / 1e-6 - 1.0).abs() < 1e-3);
        let j = b.density(1.2);
        assert!((force_noise_spectrum(&b, 0.0, -1.2).unwrap() - j).abs() < 1e-16 * j.max(1.0));
        assert!(force_noise_spectrum(&b, -1.0, 1.0).is_err());
    }

    #[test]
    fn force_noise_transforms_to_noise_kernel() {
        let b = *model(0.0).spec();
        let temp = 2.0;
        let ct = Tolerance::new(1e-10, 1e-18).unwrap();
        for &t in &[0.0, 0.5, 2.0, 5.0, 12.0] {
            let w = cosine_transform_with(|w| force_noise_spectrum(&b, temp, w).unwrap(), t, &bath_breaks(&b), &ct)
                .unwrap()
                .value
                / PI;
            let nk = noise_kernel(&b, temp, t, NoiseMode::Quantum, &ct).unwrap();
            assert!(((w - nk) / nk).abs() < 1e-5, "t={t}: {w} vs {nk}");
        }
    }

    #[test]
    fn passive_spectrum_basics() {
        let m = model(100.0);
        let silent = CavityProbe::new(5.0, -1.0, 0.0, 0.3).unwrap();
        assert_eq!(passive_spectrum(&m, &silent, 0.25, 1.0).unwrap(), 0.25);
        let loud = CavityProbe::new(1.0, 0.0, 0.5, 0.0).unwrap();
        assert!(matches!(passive_spectrum(&m, &loud, 0.0, 1.0), Err(Error::Backaction(_))));
        let p = probe();
        let flipped = p.with_theta(p.theta() + PI).unwrap();
        for &w in &[0.5, 0.99, 1.0, 1.7] {
            let a = passive_spectrum(&m, &p, 1e-9, w).unwrap();
            let b = passive_spectrum(&m, &flipped, 1e-9, w).unwrap();
            assert!(((a - b) / a).abs() < 1e-12);
        }
    }

    #[test]
    fn passive_peak_and_width() {
        let m = model(100.0);
        let p = probe();
        let g = m.gamma();
        let s_imp = 1e-12;
        let grid = linspace(0.9, 1.1, 4001);
        let s: Vec<f64> = grid.iter().map(|&w| passive_spectrum(&m, &p, s_imp, w).unwrap() - s_imp).collect();
        let (imax, smax) = s.iter().enumerate().fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        assert!((grid[imax] - 1.0).abs() < 0.1 * g);
        let half = 0.5 * smax;
        let crossing = |range: &mut dyn Iterator<Item = usize>| -> f64 {
            let mut prev = imax;
            for i in range {
                if s[i] < half {
                    let (a, b) = (s[prev], s[i]);
                    return grid[prev] + (grid[i] - grid[prev]) * (a - half) / (a - b);
                }
                prev = i;
            }
            panic!("no half-maximum crossing");
        };
        let lo = crossing(&mut (0..imax).rev());
        let hi = crossing(&mut (imax + 1..grid.len()));
        assert!(((hi - lo) / g - 1.0).abs() < 0.05, "fwhm/gamma = {}", (hi - lo) / g);
    }

    #[test]
    fn constant_transduction_near_resonance() {
        // measured against the peak height of S over the ±5γ window
        let m = model(100.0);
        let g = m.gamma();
        for &delta in &[-1.0, 0.0] {
            let base = CavityProbe::new(100.0 * g, delta, 1e-6, 0.0).unwrap();
            let p = base.with_theta(optimal_theta(&base, 1.0)).unwrap();
            let l0 = transduction(&p, 1.0).norm_sqr();
            let pairs: Vec<(f64, f64)> = (0..=100)
                .map(|i| {
                    let w = 1.0 + g * (-5.0 + 0.1 * i as f64);
                    let exact = passive_spectrum(&m, &p, 0.0, w).unwrap();
                    (exact, exact / transduction(&p, w).norm_sqr() * l0)
                })
                .collect();
            let peak = pairs.iter().map(|q| q.0).fold(0.0, f64::max);
            let worst = pairs.iter().map(|q| (q.1 - q.0).abs()).fold(0.0, f64::max);
            assert!(worst / peak < 0.01, "delta={delta}: {}", worst / peak);
        }
    }

    #[test]
    fn coherent_response_properties() {
        let m = model(0.0);
        let p = probe();
        assert_eq!(synth_coherent_response(&m, &p, Complex64::new(0.0, 0.0), 1.0).unwrap(), Complex64::new(0.0, 0.0));
        let f = Complex64::from_polar(0.7, 0.4);
        for &w in &[0.3, 1.0, 2.2] {
            let x = synth_coherent_response(&m, &p, f, w).unwrap();
            let chi = susceptibility(&m, w).unwrap().value;
            let expect = transduction(&p, w).norm_sqr() * chi.norm_sqr();
            assert!((x.norm_sqr() / f.norm_sqr() - expect).abs() < 1e-12 * expect);
        }
        let x = synth_coherent_response(&m, &p, f, 1.0).unwrap();
        let phase = (x / (transduction(&p, 1.0) * f)).arg();
        assert!((phase - 0.5 * PI).abs() < 1e-8, "{phase}");
    }

    #[test]
    fn noiseless_round_trip() {
        let m = model(0.0);
        let p = probe();
        let grid = linspace(0.1, 3.0, 200);
        let f = Complex64::new(1.0, 0.0);
        let recs = synth_records(&m, &p, 0.0, f, &grid, None).unwrap();
        let rec = reconstruct(&p, &recs, &BareParameters::from_model(&m)).unwrap();
        assert!(rec.dropped.is_empty());
        let scale = m.m_r() * m.omega_r().powi(2);
        for pt in &rec.points {
            let truth = m.spec().density(pt.omega);
            assert!(pt.j >= 0.0);
            assert!(((pt.j - truth) / truth).abs() < 1e-8, "J at {}", pt.omega);
            let sig = self_energy(m.spec(), pt.omega, m.tolerance()).unwrap().re;
            assert!(((pt.re_sigma - sig) / scale).abs() < 1e-7, "Re Sigma at {}", pt.omega);
        }
        let slope = rec.log_slope_at(m.omega_r()).unwrap();
        assert!((slope - m.spec().k()).abs() < 0.01, "{slope}");
    }

    #[test]
    fn noise_error_is_linear() {
        let m = model(0.0);
        let p = probe();
        let g = m.gamma();
        let grid = linspace(1.0 - 5.0 * g, 1.0 + 5.0 * g, 41);
        let f = Complex64::new(1.0, 0.0);
        let bare = BareParameters::from_model(&m);
        let truth = m.spec().density(1.0);
        let pts: Vec<(f64, f64)> = [1e-4, 1e-3, 1e-2]
            .iter()
            .map(|&eta| {
                let recs =
                    synth_records(&m, &p, 0.0, f, &grid, Some(MeasurementNoise { relative: eta, seed: 7 })).unwrap();
                let rec = reconstruct(&p, &recs, &bare).unwrap();
                let rms = (rec.points.iter().map(|q| ((q.j - m.spec().density(q.omega)) / truth).powi(2)).sum::<f64>()
                    / rec.points.len() as f64)
                    .sqrt();
                (eta.ln(), rms.ln())
            })
            .collect();
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|q| q.0).sum::<f64>() / n, pts.iter().map(|q| q.1).sum::<f64>() / n);
        let slope = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum::<f64>()
            / pts.iter().map(|q| (q.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 1.0).abs() < 0.1, "{slope}");
    }

    #[test]
    fn reconstruct_guards() {
        let m = model(0.0);
        let p = probe();
        let bare = BareParameters::from_model(&m);
        let mut recs = synth_records(&m, &p, 0.0, Complex64::new(1.0, 0.0), &[0.5, 1.0], None).unwrap();
        recs[1].f_ext = Complex64::new(0.0, 0.0);
        assert_eq!(reconstruct(&p, &recs, &bare), Err(Error::ZeroDrive(1.0)));
        // θ = 0, Δ = 0 makes Λ vanish identically
        let null = CavityProbe::new(2.0, 0.0, 1e-3, 0.0).unwrap();
        let recs = synth_records(&m, &null, 0.0, Complex64::new(1.0, 0.0), &[0.5, 1.0], None).unwrap();
        assert!(matches!(reconstruct(&null, &recs, &bare), Err(Error::SingularTransduction(2))));
        // Λ_θ(0) ∝ Im(e^{−iθ}χ_c(0)) vanishes for θ = arg χ_c(0)
        let base = CavityProbe::new(5.0, -1.0, 1e-3, 0.0).unwrap();
        let blind = base.with_theta(cavity_susceptibility(&base, 0.0).arg()).unwrap();
        let with_zero = synth_records(&m, &blind, 0.0, Complex64::new(1.0, 0.0), &[0.0, 0.5, 1.0], None).unwrap();
        let rec = reconstruct(&blind, &with_zero, &bare).unwrap();
        assert_eq!(rec.dropped, vec![0.0]);
        assert_eq!(rec.points.len(), 2);
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let m = model(0.0);
        let p = probe();
        let noise = Some(MeasurementNoise { relative: 1e-3, seed: 42 });
        let grid = [0.8, 1.0, 1.2];
        let a = synth_records(&m, &p, 0.0, Complex64::new(1.0, 0.0), &grid, noise).unwrap();
        let b = synth_records(&m, &p, 0.0, Complex64::new(1.0, 0.0), &grid, noise).unwrap();
        assert_eq!(a, b);
        let clean = synth_records(&m, &p, 0.0, Complex64::new(1.0, 0.0), &grid, None).unwrap();
        assert_ne!(a[1].x_coh, clean[1].x_coh);
    }
}
