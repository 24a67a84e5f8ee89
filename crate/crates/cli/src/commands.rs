use std::fmt;
use std::io;

use num_complex::Complex64;

use bathforge::bath::BathSpec;
use bathforge::correlations::{occupation, variances, CorrelationMethod, CorrelationTrace, CORRELATION_COLUMNS};
use bathforge::memory::{kernel_normalization, kernel_sign_change, KernelMethod, KernelTrace, KERNEL_COLUMNS};
use bathforge::renorm::{renorm_oracle, ResonatorModel};
use bathforge::response::{linewidth, sweep, SWEEP_COLUMNS};
use bathforge::spectroscopy::{
    reconstruct, synth_records, BareParameters, MeasurementNoise, RECONSTRUCTION_COLUMNS, RECORD_COLUMNS,
};
use bathforge::sweep::linspace;

use crate::config::{ConfigError, RunConfig};
use crate::output::{Cell, Table};

pub const FIGURE_KS: [f64; 2] = [-2.30, -1.75];
const FIG2_OMEGA_MAX: f64 = 4.0;
const FIG3_T_MAX: f64 = 20.0;
const FIGURE_POINTS: usize = 401;
const TAIL_START: f64 = 5.0;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numeric(bathforge::Error),
    Io(io::Error),
}

impl CliError {
    /// 2 for configuration or I/O problems, 3 when an integral, root or
    /// iteration failed to converge.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(e) => match e {
                bathforge::Error::NonConvergence { .. }
                | bathforge::Error::DerivativeUnstable { .. }
                | bathforge::Error::NoSignChange { .. }
                | bathforge::Error::NotFound(_) => 3,
                _ => 2,
            },
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<bathforge::Error> for CliError {
    fn from(e: bathforge::Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type Out = Result<Vec<Table>, CliError>;

fn model(cfg: &RunConfig) -> Result<ResonatorModel, CliError> {
    Ok(ResonatorModel::new(cfg.bath()?, cfg.resonator()?, cfg.tolerance())?)
}

fn omega_grid(cfg: &RunConfig) -> Vec<f64> {
    linspace(cfg.grids.omega_min, cfg.grids.omega_max, cfg.grids.n_points)
}

fn time_grid(cfg: &RunConfig) -> Vec<f64> {
    linspace(0.0, cfg.grids.t_max, cfg.grids.n_times)
}

fn note_bath(table: &mut Table, spec: &BathSpec) {
    table.note("k", spec.k());
    table.note("j_res", spec.j_res());
    table.note("a_k", spec.a_k());
}

pub fn spectral(cfg: &RunConfig) -> Out {
    let spec = cfg.bath()?;
    let mut t = Table::new("spectral", &["omega_over_omega_r", "j", "j_normalized", "log_slope"]);
    note_bath(&mut t, &spec);
    let peaks = spec.peaks()?;
    t.note("omega_j_max", peaks.omega_j_max);
    t.note("omega_c_max", peaks.omega_c_max);
    let adm = spec.admissibility();
    t.note("admissibility", format!("{adm:?}"));
    let norm = spec.a_k() * spec.omega_r().powi(3);
    for w in omega_grid(cfg) {
        let j = spec.spectral_density(w)?;
        let slope = if w > 0.0 { spec.log_slope(w)? } else { spec.s_ir() };
        t.push_nums(&[w, j, j / norm, slope]);
    }
    Ok(vec![t])
}

pub fn kernel(cfg: &RunConfig) -> Out {
    let spec = cfg.bath()?;
    let trace = KernelTrace::compute(&spec, &time_grid(cfg), KernelMethod::Bessel, &cfg.tolerance())?;
    let mut t = Table::new("kernel", &KERNEL_COLUMNS);
    note_bath(&mut t, &spec);
    t.note("normalization", kernel_normalization(&spec));
    match kernel_sign_change(&spec) {
        Ok(ts) => t.note("t_star", ts),
        Err(e) => t.note("t_star", format!("none ({e})")),
    }
    for (x, mu) in trace.normalized() {
        t.push(vec![x.into(), mu.into(), trace.method.as_str().into()]);
    }
    Ok(vec![t])
}

pub fn renorm(cfg: &RunConfig) -> Out {
    let m = model(cfg)?;
    let spec = *m.spec();
    let oracle = renorm_oracle(&spec, m.resonator(), &cfg.tolerance())?;
    let lw = linewidth(&m);
    let mut t = Table::new("renorm", &["quantity", "value"]);
    let rows: [(&str, f64); 14] = [
        ("k", spec.k()),
        ("j_res", spec.j_res()),
        ("a_k", spec.a_k()),
        ("mass", m.mass()),
        ("temperature", m.temperature()),
        ("delta_k", m.delta_k()),
        ("delta_m", m.renorm().delta_m),
        ("delta_k_quadrature", oracle.delta_k),
        ("delta_m_quadrature", oracle.delta_m),
        ("m_r", m.m_r()),
        ("omega_0", m.omega_0()),
        ("omega_r", m.omega_r()),
        ("gamma", lw.gamma),
        ("q_factor", lw.q_factor),
    ];
    for (name, v) in rows {
        t.push(vec![name.into(), v.into()]);
    }
    Ok(vec![t])
}

pub fn response(cfg: &RunConfig) -> Out {
    let m = model(cfg)?;
    let lw = linewidth(&m);
    let mut t = Table::new("response", &SWEEP_COLUMNS);
    note_bath(&mut t, m.spec());
    t.note("gamma", lw.gamma);
    t.note("m_r", lw.m_r);
    for row in sweep(&m, &omega_grid(cfg))? {
        t.push_nums(&row.values());
    }
    Ok(vec![t])
}

pub fn correlations(cfg: &RunConfig) -> Out {
    let m = model(cfg)?;
    let tol = cfg.tolerance();
    let times = time_grid(cfg);
    let (sq, sp) = variances(&m, &tol)?;
    let mut t = Table::new("correlations", &CORRELATION_COLUMNS);
    note_bath(&mut t, m.spec());
    t.note("temperature", m.temperature());
    t.note("sigma_q2", sq);
    t.note("sigma_p2", sp);
    t.note("n_r", occupation(&m));
    let late: Vec<f64> = times.iter().copied().filter(|&x| m.omega_r() * x >= TAIL_START).collect();
    let mut traces = vec![
        CorrelationTrace::compute(&m, &times, CorrelationMethod::FullQuantum, &tol)?,
        CorrelationTrace::compute(&m, &times, CorrelationMethod::Pole, &tol)?,
    ];
    if m.temperature() > 0.0 && !late.is_empty() {
        traces.push(CorrelationTrace::compute(&m, &late, CorrelationMethod::MemoryTail, &tol)?);
    }
    let w = m.omega_r();
    for tr in &traces {
        for i in 0..tr.times.len() {
            t.push(vec![(tr.times[i] * w).into(), tr.cqq[i].into(), tr.cpp[i].into(), tr.method.as_str().into()]);
        }
    }
    Ok(vec![t])
}

pub fn spectroscopy(cfg: &RunConfig) -> Out {
    let m = model(cfg)?;
    let probe = cfg.probe()?;
    let pc = cfg.probe_config();
    let noise = pc.noise.map(|relative| MeasurementNoise { relative, seed: pc.seed });
    let records = synth_records(&m, &probe, pc.s_imp, Complex64::new(pc.f_ext, 0.0), &omega_grid(cfg), noise)?;
    let rec = reconstruct(&probe, &records, &BareParameters::from_model(&m))?;

    let mut raw = Table::new("spectroscopy", &RECORD_COLUMNS);
    raw.note("kappa", probe.kappa());
    raw.note("delta", probe.delta());
    raw.note("g", probe.g());
    raw.note("theta", probe.theta());
    raw.note("weak_probe", probe.is_weak());
    for r in &records {
        raw.push_nums(&r.values());
    }

    let mut inv = Table::new("reconstruction", &RECONSTRUCTION_COLUMNS);
    note_bath(&mut inv, m.spec());
    let dropped: Vec<String> = rec.dropped.iter().map(|w| crate::output::format_float(*w)).collect();
    inv.note("dropped", format!("{} [{}]", dropped.len(), dropped.join(" ")));
    match rec.log_slope_at(m.omega_r()) {
        Ok(s) => inv.note("recovered_slope_at_omega_r", s),
        Err(e) => inv.note("recovered_slope_at_omega_r", format!("unavailable ({e})")),
    }
    for row in rec.rows(m.spec()) {
        inv.push_nums(&row);
    }
    Ok(vec![raw, inv])
}

/// Figure data in normalized units; independent of the configured bath.
pub fn figures(which: u8) -> Out {
    match which {
        2 => {
            let mut t = Table::new("figure2", &["k", "omega_over_omega_r", "j_normalized"]);
            for &k in &FIGURE_KS {
                let spec = BathSpec::calibrate(k, 1.0, 1.0)?;
                t.note(&format!("peak_k{k}"), spec.peaks()?.omega_j_max);
                for w in linspace(0.0, FIG2_OMEGA_MAX, FIGURE_POINTS) {
                    t.push_nums(&[k, w, spec.spectral_density(w)? / spec.a_k()]);
                }
            }
            Ok(vec![t])
        }
        3 => {
            let mut t = Table::new("figure3", &["k", "t_omega_r", "mu_normalized"]);
            let tol = bathforge::numerics::Tolerance::new(1e-10, 1e-16)?;
            for &k in &FIGURE_KS {
                let spec = BathSpec::calibrate(k, 1.0, 1.0)?;
                t.note(&format!("t_star_k{k}"), kernel_sign_change(&spec)?);
                let trace =
                    KernelTrace::compute(&spec, &linspace(0.0, FIG3_T_MAX, FIGURE_POINTS), KernelMethod::Bessel, &tol)?;
                for (x, mu) in trace.normalized() {
                    t.push(vec![Cell::Num(k), x.into(), mu.into()]);
                }
            }
            Ok(vec![t])
        }
        other => Err(CliError::Config(ConfigError::Invalid {
            field: "--which",
            message: format!("figure {other} does not exist (use 2 or 3)"),
        })),
    }
}
