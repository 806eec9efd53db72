//! TOML scenario files for the command-line front end.
//!
//! ```toml
//! [scenario]
//! kind = "const_east"        # or "sine_east" (needs a_mps2, omega_rad_s)
//! lat_deg = 30.0
//! ve0_mps = 500.0
//! duration_s = 3600.0
//! dt_s = 0.02
//!
//! [run]
//! algorithms = ["derived", "sv2", "tn", "sv1"]
//! ```
//!
//! Unknown keys are rejected everywhere. Relative output paths are taken
//! relative to the directory holding the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::analysis::AssumptionResiduals;
use crate::geo::{EarthModel, GravityModel};
use crate::navigator::{AttitudeSource, RunConfig};
use crate::scenario::{Scenario, ScenarioKind, DEFAULT_SUBSTEPS};
use crate::updates::Algorithm;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    ConstEast,
    SineEast,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: KindName,
    pub lat_deg: f64,
    #[serde(default)]
    pub lon_deg: f64,
    #[serde(default)]
    pub h0_m: f64,
    pub ve0_mps: f64,
    pub a_mps2: Option<f64>,
    pub omega_rad_s: Option<f64>,
    pub duration_s: f64,
    pub dt_s: f64,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
}

fn default_substeps() -> usize {
    DEFAULT_SUBSTEPS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttitudeName {
    #[default]
    IntegrateGyro,
    Truth,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "all_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub attitude: AttitudeName,
}

fn all_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { algorithms: all_algorithms(), attitude: AttitudeName::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Error series written by `run`.
    pub series_csv: Option<PathBuf>,
    /// Ranking table written by `compare`.
    pub ranking_csv: Option<PathBuf>,
    /// Horizontal position error plot written by `compare`.
    pub plot_svg: Option<PathBuf>,
    #[serde(default)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GravityName {
    #[default]
    Somigliana,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EarthSection {
    pub omega_e_rad_s: Option<f64>,
    #[serde(default)]
    pub gravity: GravityName,
    /// Required with `gravity = "constant"`.
    pub g_mps2: Option<f64>,
}

/// Residual maxima that `residuals` can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualName {
    OmegaIn,
    ConstC,
    RampU,
    RateCrossForce,
    ForceRate,
}

impl ResidualName {
    pub fn of(self, r: &AssumptionResiduals) -> f64 {
        match self {
            ResidualName::OmegaIn => r.omega_in_norm,
            ResidualName::ConstC => r.const_c_residual,
            ResidualName::RampU => r.ramp_u_residual,
            ResidualName::RateCrossForce => r.rate_cross_force,
            ResidualName::ForceRate => r.force_rate,
        }
    }
}

impl fmt::Display for ResidualName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidualName::OmegaIn => "omega_in",
            ResidualName::ConstC => "const_c",
            ResidualName::RampU => "ramp_u",
            ResidualName::RateCrossForce => "rate_cross_force",
            ResidualName::ForceRate => "force_rate",
        })
    }
}

/// Reference value with a relative band.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub value: f64,
    pub rel_tol: f64,
}

impl Expectation {
    pub fn holds(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.rel_tol * self.value.abs()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub earth: EarthSection,
    /// Expected residual maxima, checked by `residuals`.
    #[serde(default)]
    pub expect: BTreeMap<ResidualName, Expectation>,
    /// Directory relative output paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Overrides {
    pub dt_s: Option<f64>,
    pub duration_s: Option<f64>,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse { path: path.to_owned(), source },
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Parses and validates; relative paths resolve against the working
    /// directory.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: CliConfig = toml::from_str(text)
            .map_err(|source| ConfigError::Parse { path: PathBuf::from("<string>"), source: Box::new(source) })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.run.algorithms.is_empty() {
            return invalid("run.algorithms is empty".into());
        }
        for (i, a) in self.run.algorithms.iter().enumerate() {
            if self.run.algorithms[..i].contains(a) {
                return invalid(format!("run.algorithms lists {a} twice"));
            }
        }
        for (name, e) in &self.expect {
            if !(e.value.is_finite() && e.rel_tol >= 0.0 && e.rel_tol.is_finite()) {
                return invalid(format!("expect.{name} needs a finite value and non-negative rel_tol"));
            }
        }
        self.scenario(Overrides::default()).map(|_| ())
    }

    pub fn earth(&self) -> Result<EarthModel, ConfigError> {
        let mut earth = EarthModel::wgs84();
        if let Some(w) = self.earth.omega_e_rad_s {
            earth = earth.with_omega_e(w);
        }
        match (self.earth.gravity, self.earth.g_mps2) {
            (GravityName::Somigliana, None) => {}
            (GravityName::Somigliana, Some(_)) => {
                return Err(ConfigError::Invalid("earth.g_mps2 only applies to gravity = \"constant\"".into()))
            }
            (GravityName::Constant, Some(g)) => earth = earth.with_gravity(GravityModel::Constant { g }),
            (GravityName::Constant, None) => {
                return Err(ConfigError::Invalid("gravity = \"constant\" needs earth.g_mps2".into()))
            }
        }
        earth.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(earth)
    }

    pub fn scenario(&self, ov: Overrides) -> Result<Scenario, ConfigError> {
        let s = &self.scenario;
        let kind = match (s.kind, s.a_mps2, s.omega_rad_s) {
            (KindName::ConstEast, None, None) => ScenarioKind::ConstEast,
            (KindName::ConstEast, _, _) => {
                return Err(ConfigError::Invalid("a_mps2/omega_rad_s only apply to kind = \"sine_east\"".into()))
            }
            (KindName::SineEast, Some(accel), Some(omega)) => ScenarioKind::SineEast { accel, omega },
            (KindName::SineEast, _, _) => {
                return Err(ConfigError::Invalid("kind = \"sine_east\" needs a_mps2 and omega_rad_s".into()))
            }
        };
        let scn = Scenario {
            kind,
            lat0: s.lat_deg.to_radians(),
            lon0: s.lon_deg.to_radians(),
            h0: s.h0_m,
            ve0: s.ve0_mps,
            dt: ov.dt_s.unwrap_or(s.dt_s),
            duration: ov.duration_s.unwrap_or(s.duration_s),
            substeps: s.substeps,
            earth: self.earth()?,
        };
        scn.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(scn)
    }

    pub fn attitude_source(&self) -> AttitudeSource {
        match self.run.attitude {
            AttitudeName::IntegrateGyro => AttitudeSource::IntegrateGyro,
            AttitudeName::Truth => AttitudeSource::TruthAttitude,
        }
    }

    /// One paired configuration per listed algorithm.
    pub fn run_configs(&self, ov: Overrides) -> Result<Vec<RunConfig>, ConfigError> {
        let scenario = self.scenario(ov)?;
        Ok(self
            .run
            .algorithms
            .iter()
            .map(|&alg| RunConfig { attitude_source: self.attitude_source(), ..RunConfig::paired(scenario, alg) })
            .collect())
    }

    /// `path` resolved against the config file's directory.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_owned()
        } else {
            self.base_dir.join(path)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[scenario]
kind = "const_east"
lat_deg = 30.0
ve0_mps = 500.0
duration_s = 10.0
dt_s = 0.02
"#;

    #[test]
    fn minimal_file_uses_defaults() {
        let cfg = CliConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.run.algorithms, Algorithm::ALL.to_vec());
        let s = cfg.scenario(Overrides::default()).unwrap();
        assert_eq!(s.steps(), 500);
        assert_eq!(s.substeps, DEFAULT_SUBSTEPS);
        assert_eq!(s.earth, EarthModel::wgs84());
        assert!(cfg.expect.is_empty());
    }

    #[test]
    fn overrides_replace_dt_and_duration() {
        let cfg = CliConfig::parse(MINIMAL).unwrap();
        let s = cfg.scenario(Overrides { dt_s: Some(0.04), duration_s: Some(20.0) }).unwrap();
        assert_eq!((s.dt, s.duration, s.steps()), (0.04, 20.0, 500));
        assert!(cfg.scenario(Overrides { dt_s: Some(0.03), ..Overrides::default() }).is_err());
    }

    #[test]
    fn rejects_unknown_and_inconsistent_keys() {
        let bad = [
            format!("{MINIMAL}colour = 1\n"),
            MINIMAL.replace("[scenario]", "[scenario]\nspeed = 3"),
            format!("{MINIMAL}[run]\nalgorithms = []\n"),
            format!("{MINIMAL}[run]\nalgorithms = [\"rk4\"]\n"),
            format!("{MINIMAL}[run]\nalgorithms = [\"tn\", \"tn\"]\n"),
            MINIMAL.replace("const_east", "sine_east"),
            format!("{MINIMAL}a_mps2 = 1.0\n"),
            format!("{MINIMAL}[earth]\ngravity = \"constant\"\n"),
            format!("{MINIMAL}[expect]\nomega_in = {{ value = 1.0, rel_tol = -1.0 }}\n"),
            format!("{MINIMAL}[expect]\nnot_a_residual = {{ value = 1.0, rel_tol = 0.1 }}\n"),
            MINIMAL.replace("30.0", "90.0"),
        ];
        for text in bad {
            assert!(CliConfig::parse(&text).is_err(), "{text}");
        }
    }

    #[test]
    fn earth_block() {
        let text = format!("{MINIMAL}[earth]\nomega_e_rad_s = 0.0\ngravity = \"constant\"\ng_mps2 = 9.8\n");
        let earth = CliConfig::parse(&text).unwrap().earth().unwrap();
        assert_eq!(earth.omega_e, 0.0);
        assert_eq!(earth.gravity, GravityModel::Constant { g: 9.8 });
    }

    #[test]
    fn bundled_configs_parse() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
        let a = CliConfig::load(&dir.join("scenario_a.toml")).unwrap();
        assert_eq!(a.scenario(Overrides::default()).unwrap(), Scenario::const_east_default());
        let b = CliConfig::load(&dir.join("scenario_b.toml")).unwrap();
        assert_eq!(b.scenario(Overrides::default()).unwrap(), Scenario::sine_east_default());
        assert_eq!(a.base_dir, dir);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(CliConfig::load(Path::new("/nonexistent/x.toml")), Err(ConfigError::Io { .. })));
    }
}
