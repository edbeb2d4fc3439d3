//! Run configuration read from JSON. Unknown keys are rejected and parse
//! errors carry the JSON pointer of the offending value.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::closure::{
    ClosureError, EquilibriumClosure, GerochLindblom, MonatomicJuttner, Perturbed, PolyatomicAcpr, PolyatomicPr,
    TransportCoefficients, UserClosure,
};
use crate::eckart_check::FieldFamily;
use crate::spline::CubicSpline;
use crate::state_models::{JuttnerGas, ModelError, Omega, PhysicalConstants, PolyatomicGas, StateModel, ThermalState, UserModel};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid config at {pointer}: {message}")]
    Parse { pointer: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<ModelError> for ConfigError {
    fn from(e: ModelError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

impl From<ClosureError> for ConfigError {
    fn from(e: ClosureError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Juttner,
    /// `e = ρc²ω(γ)`, `p = ρc²/γ`. `omega_table` gives `ω` directly;
    /// `omega_perturbation` is added to the monatomic `G − 1/γ`.
    #[serde(alias = "polyatomic_pr", alias = "polyatomic_acpr")]
    Polyatomic {
        #[serde(default)]
        omega_table: Option<Vec<[f64; 2]>>,
        #[serde(default)]
        omega_perturbation: Option<Vec<[f64; 2]>>,
    },
    User {
        pressure: String,
        internal_energy: String,
        #[serde(default)]
        entropy_reference: Option<[f64; 2]>,
        #[serde(default)]
        integrability_tolerance: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClosureSpec {
    MonatomicJuttner,
    PolyatomicPr {
        #[serde(default)]
        beta_table: Option<Vec<[f64; 2]>>,
    },
    PolyatomicAcpr,
    GerochLindblom {
        c1: f64,
        c2: f64,
    },
    User {
        b: String,
        #[serde(default)]
        a: Option<String>,
    },
}

/// Relative perturbation of a closure, `a → a(1 + δa)`, `b → b(1 + δb)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Perturbation {
    pub delta_a: f64,
    pub delta_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Log
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / n;
                match self.spacing {
                    Spacing::Log => (self.min.ln() + f * (self.max / self.min).ln()).exp(),
                    Spacing::Linear => self.min + f * (self.max - self.min),
                }
            })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<(), ConfigError> {
        if !(self.min > 0.0 && self.max >= self.min && self.max.is_finite() && self.count >= 1) {
            return Err(ConfigError::Invalid(format!(
                "grid axis {name} needs 0 < min <= max and count >= 1"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub rho: AxisSpec,
    pub temperature: AxisSpec,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            rho: AxisSpec {
                min: 1e-3,
                max: 1e3,
                count: 20,
                spacing: Spacing::Log,
            },
            temperature: AxisSpec {
                min: 0.01,
                max: 10.0,
                count: 20,
                spacing: Spacing::Log,
            },
        }
    }
}

impl GridSpec {
    /// All `(ρ, T)` pairs, `ρ` varying slowest.
    pub fn states(&self) -> Vec<ThermalState> {
        let ts = self.temperature.values();
        self.rho
            .values()
            .into_iter()
            .flat_map(|rho| ts.iter().map(move |&temperature| ThermalState { rho, temperature }))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldPointsSpec {
    pub count: usize,
    pub seed: u64,
    pub family: FieldFamily,
}

impl Default for FieldPointsSpec {
    fn default() -> Self {
        Self {
            count: 100,
            seed: 20240607,
            family: FieldFamily::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassicalSpec {
    /// `[ρ, T]` pairs at which limits are taken.
    pub states: Vec<[f64; 2]>,
    /// Light speeds; defaults to `c₀·{1, 2, 4, 8, 16}` with `γ(c₀) = 10`.
    pub c_sequence: Option<Vec<f64>>,
    /// Largest accepted extrapolation error, relative.
    pub tolerance: f64,
}

impl Default for ClassicalSpec {
    fn default() -> Self {
        Self {
            states: vec![[1.0, 1.0]],
            c_sequence: None,
            tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub compatibility: f64,
    pub production: f64,
    pub heatflux: f64,
    pub projection: f64,
    pub main_field: f64,
    pub classical_residual: f64,
    pub entropy_production: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            compatibility: 1e-9,
            production: 1e-9,
            heatflux: 1e-9,
            projection: 1e-8,
            main_field: 1e-10,
            classical_residual: 1e-6,
            entropy_production: 1e-12,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<(), ConfigError> {
        let all = [
            self.compatibility,
            self.production,
            self.heatflux,
            self.projection,
            self.main_field,
            self.classical_residual,
            self.entropy_production,
        ];
        if all.iter().all(|t| *t > 0.0 && t.is_finite()) {
            Ok(())
        } else {
            Err(ConfigError::Invalid("tolerances must be positive".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[derive(clap::ValueEnum)]
pub enum Suite {
    Compatibility,
    Production,
    Heatflux,
    Projection,
    MainField,
    Convexity,
    ClassicalLimit,
    EntropyProduction,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Compatibility,
        Suite::Production,
        Suite::Heatflux,
        Suite::Projection,
        Suite::MainField,
        Suite::Convexity,
        Suite::ClassicalLimit,
        Suite::EntropyProduction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Compatibility => "compatibility",
            Suite::Production => "production",
            Suite::Heatflux => "heatflux",
            Suite::Projection => "projection",
            Suite::MainField => "main_field",
            Suite::Convexity => "convexity",
            Suite::ClassicalLimit => "classical_limit",
            Suite::EntropyProduction => "entropy_production",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExportSpec {
    /// Adds `B1_pi`, `B3`, `B4` columns.
    pub lmr_symbols: bool,
}

impl Default for ExportSpec {
    fn default() -> Self {
        Self { lmr_symbols: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub constants: PhysicalConstants,
    pub model: ModelSpec,
    pub closure: ClosureSpec,
    #[serde(default)]
    pub perturbation: Perturbation,
    pub transport: TransportCoefficients,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub field_points: FieldPointsSpec,
    #[serde(default)]
    pub classical: ClassicalSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Suites run when none are named on the command line; all by default.
    #[serde(default)]
    pub suites: Option<Vec<Suite>>,
    #[serde(default)]
    pub export: ExportSpec,
}

/// A validated configuration with its model and closure built.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub model: Arc<dyn StateModel>,
    pub closure: Arc<dyn EquilibriumClosure>,
    /// SHA-256 of the raw config bytes, hex.
    pub sha256: String,
}

fn spline(pairs: &[[f64; 2]], what: &str) -> Result<CubicSpline, ConfigError> {
    CubicSpline::from_pairs(pairs).map_err(|e| ConfigError::Invalid(format!("{what}: {e}")))
}

impl ModelSpec {
    fn omega(&self) -> Result<Option<Omega>, ConfigError> {
        match self {
            ModelSpec::Juttner => Ok(Some(Omega::Monatomic)),
            ModelSpec::Polyatomic {
                omega_table,
                omega_perturbation,
            } => match (omega_table, omega_perturbation) {
                (Some(t), None) => Ok(Some(Omega::Table(spline(t, "omega_table")?))),
                (None, Some(t)) => Ok(Some(Omega::PerturbedMonatomic(spline(t, "omega_perturbation")?))),
                (None, None) => Ok(None),
                (Some(_), Some(_)) => Err(ConfigError::Invalid(
                    "model: give either omega_table or omega_perturbation, not both".into(),
                )),
            },
            ModelSpec::User { .. } => Ok(None),
        }
    }

    pub fn build(&self) -> Result<Arc<dyn StateModel>, ConfigError> {
        Ok(match self {
            ModelSpec::Juttner => Arc::new(JuttnerGas),
            ModelSpec::Polyatomic { .. } => match self.omega()? {
                Some(omega) => Arc::new(PolyatomicGas::new(omega)),
                None => {
                    return Err(ConfigError::Invalid(
                        "polyatomic model needs omega_table or omega_perturbation".into(),
                    ))
                }
            },
            ModelSpec::User {
                pressure,
                internal_energy,
                entropy_reference,
                integrability_tolerance,
            } => {
                let mut m = UserModel::from_expressions("user", pressure, internal_energy)?;
                if let Some([rho, t]) = entropy_reference {
                    m = m.with_entropy_reference(ThermalState::new(*rho, *t)?);
                }
                if let Some(tol) = integrability_tolerance {
                    m = m.with_integrability_tolerance(*tol);
                }
                Arc::new(m)
            }
        })
    }
}

impl ClosureSpec {
    pub fn build(&self, model: &ModelSpec) -> Result<Arc<dyn EquilibriumClosure>, ConfigError> {
        let omega = || -> Result<Omega, ConfigError> {
            model.omega()?.ok_or_else(|| {
                ConfigError::Invalid("polyatomic closures need a model with an omega(gamma) function".into())
            })
        };
        Ok(match self {
            ClosureSpec::MonatomicJuttner => Arc::new(MonatomicJuttner),
            ClosureSpec::PolyatomicPr { beta_table } => {
                let mut c = PolyatomicPr::new(omega()?);
                if let Some(t) = beta_table {
                    c = c.with_beta_table(spline(t, "beta_table")?);
                }
                Arc::new(c)
            }
            ClosureSpec::PolyatomicAcpr => Arc::new(PolyatomicAcpr::new(omega()?)),
            ClosureSpec::GerochLindblom { c1, c2 } => Arc::new(GerochLindblom::new(*c1, *c2)),
            ClosureSpec::User { b, a } => Arc::new(UserClosure::from_expressions("user", b, a.as_deref())?),
        })
    }
}

impl RunConfig {
    /// Parses JSON, reporting the pointer of the first bad value.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let pointer = if path == "." {
                "/".to_owned()
            } else {
                format!("/{}", path.replace('.', "/").replace('[', "").replace(']', ""))
            };
            ConfigError::Parse {
                pointer,
                message: e.into_inner().to_string(),
            }
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.constants.validate()?;
        self.transport.validate()?;
        self.grid.rho.validate("rho")?;
        self.grid.temperature.validate("temperature")?;
        self.tolerances.validate()?;
        self.field_points.family.validate().map_err(ConfigError::Invalid)?;
        if self.classical.states.iter().any(|s| !(s[0] > 0.0 && s[1] > 0.0)) {
            return Err(ConfigError::Invalid("classical states need rho > 0 and T > 0".into()));
        }
        if !(self.classical.tolerance > 0.0) {
            return Err(ConfigError::Invalid("classical tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Parses, validates and builds model and closure.
    pub fn load(text: &str) -> Result<LoadedConfig, ConfigError> {
        let config = Self::from_json(text)?;
        config.validate()?;
        let model = config.model.build()?;
        let mut closure = config.closure.build(&config.model)?;
        let p = config.perturbation;
        if p.delta_a != 0.0 || p.delta_b != 0.0 {
            closure = Arc::new(Perturbed::new(closure, p.delta_a, p.delta_b));
        }
        let sha256 = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        Ok(LoadedConfig {
            config,
            model,
            closure,
            sha256,
        })
    }

    pub fn load_file(path: &Path) -> Result<LoadedConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::load(&text)
    }

    pub fn selected_suites(&self, requested: &[Suite]) -> Vec<Suite> {
        let mut s: Vec<Suite> = if !requested.is_empty() {
            requested.to_vec()
        } else {
            self.suites.clone().unwrap_or_else(|| Suite::ALL.to_vec())
        };
        s.sort();
        s.dedup();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {"kind": "juttner"},
        "closure": {"kind": "monatomic_juttner"},
        "transport": {"chi": 1.0, "mu": 1.0, "nu": 1.0}
    }"#;

    #[test]
    fn minimal_config_loads() {
        let loaded = RunConfig::load(MINIMAL).unwrap();
        assert_eq!(loaded.config.grid.states().len(), 400);
        assert_eq!(loaded.sha256.len(), 64);
        assert_eq!(loaded.config.selected_suites(&[]).len(), 8);
    }

    #[test]
    fn unknown_keys_rejected_with_pointer() {
        let bad = MINIMAL.replace(r#""mu": 1.0"#, r#""mu": 1.0, "eta": 2.0"#);
        match RunConfig::from_json(&bad) {
            Err(ConfigError::Parse { pointer, .. }) => assert_eq!(pointer, "/transport/eta"),
            other => panic!("{other:?}"),
        }
        let bad = MINIMAL.replace(r#""chi": 1.0"#, r#""chi": "x""#);
        match RunConfig::from_json(&bad) {
            Err(ConfigError::Parse { pointer, .. }) => assert_eq!(pointer, "/transport/chi"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn acpr_needs_omega() {
        let cfg = r#"{
            "model": {"kind": "user", "pressure": "rho*T", "internal_energy": "1.5*T"},
            "closure": {"kind": "polyatomic_acpr"},
            "transport": {"chi": 1.0, "mu": 1.0, "nu": 1.0}
        }"#;
        assert!(matches!(RunConfig::load(cfg), Err(ConfigError::Invalid(_))));
        let poly = r#"{
            "model": {"kind": "polyatomic_acpr"},
            "closure": {"kind": "polyatomic_acpr"},
            "transport": {"chi": 1.0, "mu": 1.0, "nu": 1.0}
        }"#;
        assert!(matches!(RunConfig::load(poly), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn axis_values() {
        let a = AxisSpec {
            min: 1.0,
            max: 100.0,
            count: 3,
            spacing: Spacing::Log,
        };
        let v = a.values();
        assert!((v[1] - 10.0).abs() < 1e-12);
        let l = AxisSpec {
            spacing: Spacing::Linear,
            ..a
        };
        assert_eq!(l.values()[1], 50.5);
    }
}
