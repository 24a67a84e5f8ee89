//! Run configuration: TOML or JSON on disk, validated and converted to
//! reduced units (Ω_R = M = ħ = 1).

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use bathforge::bath::BathSpec;
use bathforge::numerics::Tolerance;
use bathforge::renorm::{calibrate_for_quality, Resonator};
use bathforge::spectroscopy::{optimal_theta, CavityProbe};
use bathforge::units::{hz_to_rad, reduced_temperature};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Read(String),
    Parse(String),
    Invalid { field: &'static str, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse(m) => write!(f, "cannot parse config: {m}"),
            ConfigError::Invalid { field, message } => write!(f, "invalid config at {field}: {message}"),
        }
    }
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub k: f64,
    pub omega_r_hz: f64,
    /// J(Ω_R) in units of MΩ_R².
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_res: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_target: Option<f64>,
}

impl Default for BathConfig {
    fn default() -> Self {
        BathConfig { k: -2.30, omega_r_hz: 0.914e6, j_res: None, q_target: Some(215.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeConfig {
    Anchored,
    Forward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonatorConfig {
    /// Mass in units of M (reduced: 1).
    pub mass: f64,
    pub temperature_kelvin: f64,
    pub mode: ModeConfig,
    /// Bare frequency, forward mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_0_hz: Option<f64>,
}

impl Default for ResonatorConfig {
    fn default() -> Self {
        ResonatorConfig { mass: 1.0, temperature_kelvin: 300.0, mode: ModeConfig::Anchored, omega_0_hz: None }
    }
}

/// Cavity parameters in units of Ω_R; `theta` defaults to the angle that
/// maximizes |Λ_θ(Ω_R)|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub kappa: f64,
    pub delta: f64,
    pub g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub s_imp: f64,
    pub f_ext: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { kappa: 5.0, delta: -1.0, g: 1e-3, theta: None, s_imp: 0.0, f_ext: 1.0, noise: None, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
    pub t_max: f64,
    pub n_times: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { omega_min: 0.1, omega_max: 3.0, n_points: 200, t_max: 40.0, n_times: 81 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "bathforge-out".into(), format: Format::Csv }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Integrand evaluations allowed per integral.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_evals: Option<usize>,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig { rel_tol: 1e-10, abs_tol: 1e-16, max_evals: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bath: BathConfig,
    pub resonator: ResonatorConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeConfig>,
    pub grids: GridConfig,
    pub output: OutputConfig,
    pub numerics: NumericsConfig,
}

fn finite(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be finite, got {v}")))
    }
}

fn positive(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if finite(field, v)? > 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if finite(field, v)? >= 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be non-negative, got {v}")))
    }
}

impl RunConfig {
    /// Checks every field; the first problem is reported with its path.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let b = &self.bath;
        if !(finite("bath.k", b.k)? < 1.0) {
            return Err(invalid("bath.k", format!("must be below 1 for a peaked, admissible bath, got {}", b.k)));
        }
        positive("bath.omega_r_hz", b.omega_r_hz)?;
        match (b.j_res, b.q_target) {
            (Some(j), None) => {
                positive("bath.j_res", j)?;
            }
            (None, Some(q)) => {
                positive("bath.q_target", q)?;
            }
            (Some(_), Some(_)) => return Err(invalid("bath", "give exactly one of j_res and q_target, not both")),
            (None, None) => return Err(invalid("bath", "one of j_res or q_target is required")),
        }
        let r = &self.resonator;
        positive("resonator.mass", r.mass)?;
        non_negative("resonator.temperature_kelvin", r.temperature_kelvin)?;
        match (r.mode, r.omega_0_hz) {
            (ModeConfig::Forward, None) => return Err(invalid("resonator.omega_0_hz", "required in forward mode")),
            (ModeConfig::Forward, Some(w)) => {
                positive("resonator.omega_0_hz", w)?;
            }
            (ModeConfig::Anchored, Some(_)) => {
                return Err(invalid("resonator.omega_0_hz", "only meaningful in forward mode"))
            }
            (ModeConfig::Anchored, None) => {}
        }
        if let Some(p) = &self.probe {
            positive("probe.kappa", p.kappa)?;
            finite("probe.delta", p.delta)?;
            non_negative("probe.g", p.g)?;
            if let Some(th) = p.theta {
                finite("probe.theta", th)?;
            }
            non_negative("probe.s_imp", p.s_imp)?;
            if finite("probe.f_ext", p.f_ext)? == 0.0 {
                return Err(invalid("probe.f_ext", "drive amplitude must be non-zero"));
            }
            if let Some(eta) = p.noise {
                non_negative("probe.noise", eta)?;
            }
        }
        let g = &self.grids;
        non_negative("grids.omega_min", g.omega_min)?;
        if !(finite("grids.omega_max", g.omega_max)? > g.omega_min) {
            return Err(invalid("grids.omega_max", "must exceed grids.omega_min"));
        }
        if g.n_points < 2 {
            return Err(invalid("grids.n_points", format!("must be at least 2, got {}", g.n_points)));
        }
        positive("grids.t_max", g.t_max)?;
        if g.n_times < 2 {
            return Err(invalid("grids.n_times", format!("must be at least 2, got {}", g.n_times)));
        }
        if self.output.dir.is_empty() {
            return Err(invalid("output.dir", "must not be empty"));
        }
        self.try_tolerance().map_err(|e| invalid("numerics", e.to_string()))?;
        Ok(())
    }

    fn try_tolerance(&self) -> bathforge::Result<Tolerance> {
        let tol = Tolerance::new(self.numerics.rel_tol, self.numerics.abs_tol)?;
        match self.numerics.max_evals {
            Some(n) => tol.with_max_evals(n),
            None => Ok(tol),
        }
    }

    pub fn tolerance(&self) -> Tolerance {
        self.try_tolerance().expect("validated tolerance")
    }

    /// Ω_R in rad/s; the reduced unit of frequency.
    pub fn omega_r_rad(&self) -> f64 {
        hz_to_rad(self.bath.omega_r_hz)
    }

    /// k_BT/(ħΩ_R).
    pub fn reduced_temperature(&self) -> f64 {
        reduced_temperature(self.resonator.temperature_kelvin, self.omega_r_rad())
    }

    pub fn resonator(&self) -> bathforge::Result<Resonator> {
        let r = &self.resonator;
        let t = self.reduced_temperature();
        match (r.mode, r.omega_0_hz) {
            (ModeConfig::Forward, Some(w0)) => Resonator::forward(r.mass, w0 / self.bath.omega_r_hz, t),
            _ => Resonator::anchored(r.mass, 1.0, t),
        }
    }

    /// The bath in reduced units, solving for J(Ω_R) when a Q is given.
    pub fn bath(&self) -> bathforge::Result<BathSpec> {
        match (self.bath.j_res, self.bath.q_target) {
            (Some(j), _) => BathSpec::calibrate(self.bath.k, 1.0, j),
            (None, Some(q)) => calibrate_for_quality(self.bath.k, 1.0, self.resonator.mass, q, &self.tolerance()),
            (None, None) => unreachable!("validated config has j_res or q_target"),
        }
    }

    pub fn probe_config(&self) -> ProbeConfig {
        self.probe.clone().unwrap_or_default()
    }

    pub fn probe(&self) -> bathforge::Result<CavityProbe> {
        let p = self.probe_config();
        let probe = CavityProbe::new(p.kappa, p.delta, p.g, 0.0)?;
        probe.with_theta(p.theta.unwrap_or_else(|| optimal_theta(&probe, 1.0)))
    }
}

/// Reads a TOML or JSON config (chosen by extension) and validates it.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(format!("{}: {e}", path.display())))?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let cfg: RunConfig = match ext.as_str() {
        "toml" => toml::from_str(&text).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?,
        "json" => serde_json::from_str(&text).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?,
        other => {
            return Err(ConfigError::Parse(format!(
                "{}: unknown config extension '{other}' (expected .toml or .json)",
                path.display()
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert!((c.omega_r_rad() - 2.0 * std::f64::consts::PI * 0.914e6).abs() < 1e-6);
        assert!((c.reduced_temperature() / 6.84e6 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn exactly_one_of_j_res_and_q() {
        let mut c = RunConfig::default();
        c.bath.q_target = None;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field: "bath", .. })));
        c.bath.j_res = Some(0.004);
        c.validate().unwrap();
        c.bath.q_target = Some(100.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn field_paths() {
        let mut c = RunConfig::default();
        c.grids.n_points = 1;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field: "grids.n_points", .. })));
        let mut c = RunConfig::default();
        c.resonator.mode = ModeConfig::Forward;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field: "resonator.omega_0_hz", .. })));
        let mut c = RunConfig::default();
        c.bath.k = 1.5;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field: "bath.k", .. })));
    }

    #[test]
    fn toml_and_json_agree() {
        let t: RunConfig = toml::from_str("[bath]\nk = -1.75\nomega_r_hz = 1e6\nj_res = 0.01\n").unwrap();
        let j: RunConfig = serde_json::from_str(r#"{"bath": {"k": -1.75, "omega_r_hz": 1e6, "j_res": 0.01}}"#).unwrap();
        assert_eq!(t, j);
        assert_eq!(t.grids, GridConfig::default());
        assert!(toml::from_str::<RunConfig>("[bath]\nk = -1.75\nomega_r_hz = 1e6\nj_res = 0.01\nextra = 1\n").is_err());
    }
}
