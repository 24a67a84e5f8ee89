//! Quick oracle checks: closed forms against quadrature, exact identities and
//! the spectroscopy round trip. Runs in reduced units and ignores the config.

use num_complex::Complex64;

use bathforge::bath::BathSpec;
use bathforge::memory::{dissipation_kernel, dissipation_kernel_oracle};
use bathforge::numerics::Tolerance;
use bathforge::renorm::{calibrate_for_quality, mass_shift, renorm_oracle, stiffness_shift, Resonator, ResonatorModel};
use bathforge::response::{linewidth, self_energy, susceptibility};
use bathforge::spectroscopy::{optimal_theta, reconstruct, synth_records, BareParameters, CavityProbe};
use bathforge::sweep::linspace;

const BAND: [f64; 4] = [-3.35, -2.30, -1.75, -1.25];

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, worst: f64, limit: f64) -> Check {
    Check { name: name.into(), pass: worst <= limit, detail: format!("worst {worst:.3e} (limit {limit:.0e})") }
}

fn failed(name: impl Into<String>, e: bathforge::Error) -> Check {
    Check { name: name.into(), pass: false, detail: e.to_string() }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn slope_at_resonance() -> bathforge::Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let k = -3.35 + 2.1 * i as f64 / 20.0;
        let spec = BathSpec::calibrate(k, 1.0, 1.0)?;
        worst = worst.max((spec.log_slope(1.0)? - k).abs());
    }
    Ok(worst)
}

fn shifts(tol: &Tolerance) -> bathforge::Result<f64> {
    let mut worst: f64 = 0.0;
    for &k in &BAND {
        let spec = BathSpec::calibrate(k, 1.0, 0.004_641)?;
        let q = renorm_oracle(&spec, &Resonator::anchored(1.0, 1.0, 0.0)?, tol)?;
        worst = worst.max(rel(q.delta_k, stiffness_shift(&spec)?));
        worst = worst.max(rel(q.delta_m, mass_shift(&spec)?));
    }
    Ok(worst)
}

fn kernel(tol: &Tolerance) -> bathforge::Result<(f64, f64)> {
    let mut worst: f64 = 0.0;
    let mut origin: f64 = 0.0;
    for &k in &BAND {
        let spec = BathSpec::calibrate(k, 1.0, 0.004_641)?;
        for &t in &[0.5, 2.0, 5.0, 10.0, 20.0] {
            worst = worst.max(rel(dissipation_kernel_oracle(&spec, t, tol)?, dissipation_kernel(&spec, t)?));
        }
        origin = origin.max(rel(dissipation_kernel(&spec, 0.0)?, stiffness_shift(&spec)?));
    }
    Ok((worst, origin))
}

fn reference_model(tol: &Tolerance) -> bathforge::Result<ResonatorModel> {
    let spec = calibrate_for_quality(-2.30, 1.0, 1.0, 215.0, tol)?;
    ResonatorModel::new(spec, Resonator::anchored(1.0, 1.0, 0.0)?, *tol)
}

fn identities(m: &ResonatorModel) -> bathforge::Result<f64> {
    let mut worst: f64 = 0.0;
    for w in linspace(0.05, 4.0, 12) {
        let chi = susceptibility(m, w)?;
        let j = m.spec().spectral_density(w)?;
        worst = worst.max(rel(chi.value.im, j / chi.inverse.norm_sqr()));
        let mirror = susceptibility(m, -w)?.value;
        worst = worst.max((mirror - chi.value.conj()).norm() / chi.value.norm());
    }
    Ok(worst)
}

fn round_trip(m: &ResonatorModel) -> bathforge::Result<(f64, f64)> {
    let base = CavityProbe::new(5.0, -1.0, 1e-3, 0.0)?;
    let probe = base.with_theta(optimal_theta(&base, 1.0))?;
    let grid = linspace(0.1, 3.0, 200);
    let recs = synth_records(m, &probe, 0.0, Complex64::new(1.0, 0.0), &grid, None)?;
    let rec = reconstruct(&probe, &recs, &BareParameters::from_model(m))?;
    let mut wj: f64 = 0.0;
    let mut ws: f64 = 0.0;
    for p in &rec.points {
        wj = wj.max(rel(p.j, m.spec().spectral_density(p.omega)?));
        ws = ws.max((p.re_sigma - self_energy(m.spec(), p.omega, m.tolerance())?.re).abs());
    }
    Ok((wj, ws))
}

pub fn run() -> Vec<Check> {
    let tol = Tolerance::new(1e-12, 1e-16).expect("static tolerance");
    let mut out = Vec::new();
    match slope_at_resonance() {
        Ok(w) => out.push(check("log-slope at resonance equals k", w, 1e-12)),
        Err(e) => out.push(failed("log-slope at resonance equals k", e)),
    }
    match shifts(&tol) {
        Ok(w) => out.push(check("delta_K, delta_M closed form vs quadrature", w, 1e-7)),
        Err(e) => out.push(failed("delta_K, delta_M closed form vs quadrature", e)),
    }
    match kernel(&tol) {
        Ok((w, o)) => {
            out.push(check("memory kernel closed form vs quadrature", w, 1e-7));
            out.push(check("memory kernel at t = 0 equals delta_K", o, 1e-8));
        }
        Err(e) => out.push(failed("memory kernel closed form vs quadrature", e)),
    }
    match reference_model(&tol) {
        Ok(m) => {
            let lw = linewidth(&m);
            out.push(check("Q = 215 linewidth", (lw.gamma - 4.651e-3).abs(), 1e-5));
            match identities(&m) {
                Ok(w) => out.push(check("susceptibility identities", w, 1e-10)),
                Err(e) => out.push(failed("susceptibility identities", e)),
            }
            match round_trip(&m) {
                Ok((wj, ws)) => {
                    out.push(check("reconstruction round trip: J", wj, 1e-8));
                    out.push(check("reconstruction round trip: Re Sigma", ws, 1e-7));
                }
                Err(e) => out.push(failed("reconstruction round trip", e)),
            }
        }
        Err(e) => out.push(failed("Q = 215 resonator model", e)),
    }
    out
}
