//! Thermal and caloric state equations `p(ρ,T)`, `e(ρ,T)` with their first
//! derivatives, and the equilibrium entropy obtained from the Gibbs relation
//! `T dS = dε − p/ρ² dρ`.
//!
//! Built-in models: the Jüttner (monatomic, non-degenerate) gas and the
//! polyatomic gas `e = ρc²ω(γ)`, `p = ρc²/γ` with a user-chosen `ω`.
//! Arbitrary models can be supplied as callables or expressions; missing
//! derivatives are filled in by central differences.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Expression;
use crate::numeric::{central_difference, gauss_legendre, integrate};
use crate::special_functions::{bessel_k_scaled_sequence, bessel_ratio_g_derivatives, BesselError};
use crate::spline::{CubicSpline, SplineError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid thermal state rho={rho}, T={temperature}: both must be positive and finite")]
    InvalidState { rho: f64, temperature: f64 },
    #[error("invalid physical constants: c, m and k_B must be positive")]
    InvalidConstants,
    #[error("model `{model}` is undefined at {coordinate} = {value} (valid range [{min}, {max}])")]
    OutOfRange {
        model: String,
        coordinate: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("model `{model}` produced a non-finite {quantity} at rho={rho}, T={temperature}")]
    NonFinite {
        model: String,
        quantity: &'static str,
        rho: f64,
        temperature: f64,
    },
    #[error("model `{model}` violates Gibbs integrability at rho={rho}, T={temperature}: relative residual {residual:.3e}")]
    NonIntegrable {
        model: String,
        rho: f64,
        temperature: f64,
        residual: f64,
    },
    #[error("expression error: {0}")]
    Expression(String),
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error(transparent)]
    Spline(#[from] SplineError),
}

/// `c`, particle rest mass `m`, Boltzmann constant `k_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub c: f64,
    pub m: f64,
    pub k_b: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            c: 1.0,
            m: 1.0,
            k_b: 1.0,
        }
    }
}

impl PhysicalConstants {
    pub fn new(c: f64, m: f64, k_b: f64) -> Result<Self, ModelError> {
        let k = Self { c, m, k_b };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(self.c) && ok(self.m) && ok(self.k_b) {
            Ok(())
        } else {
            Err(ModelError::InvalidConstants)
        }
    }

    /// Same constants with a different light speed.
    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }

    /// `γ = m c² / (k_B T)`.
    pub fn gamma(&self, temperature: f64) -> f64 {
        self.m * self.c * self.c / (self.k_b * temperature)
    }

    /// Temperature at which `γ` takes the given value.
    pub fn temperature_for_gamma(&self, gamma: f64) -> f64 {
        self.m * self.c * self.c / (self.k_b * gamma)
    }
}

/// Rest-frame mass density and absolute temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub rho: f64,
    pub temperature: f64,
}

impl ThermalState {
    pub fn new(rho: f64, temperature: f64) -> Result<Self, ModelError> {
        let s = Self { rho, temperature };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.rho > 0.0 && self.rho.is_finite() && self.temperature > 0.0 && self.temperature.is_finite() {
            Ok(())
        } else {
            Err(ModelError::InvalidState {
                rho: self.rho,
                temperature: self.temperature,
            })
        }
    }
}

/// Pressure, energy density `e = ρ(c² + ε)` and first derivatives at a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateEvaluation {
    pub state: ThermalState,
    pub p: f64,
    pub e: f64,
    pub eps: f64,
    pub p_rho: f64,
    pub p_t: f64,
    pub e_rho: f64,
    pub e_t: f64,
    pub eps_rho: f64,
    /// Specific heat at constant volume, `c_V = ε_T`.
    pub eps_t: f64,
}

impl StateEvaluation {
    /// Assembles an evaluation from `p`, `ε` and their derivatives.
    pub fn from_specific(
        state: ThermalState,
        k: &PhysicalConstants,
        (p, p_rho, p_t): (f64, f64, f64),
        (eps, eps_rho, eps_t): (f64, f64, f64),
    ) -> Self {
        let rho = state.rho;
        Self {
            state,
            p,
            e: rho * (k.c * k.c + eps),
            eps,
            p_rho,
            p_t,
            e_rho: k.c * k.c + eps + rho * eps_rho,
            e_t: rho * eps_t,
            eps_rho,
            eps_t,
        }
    }

    /// `e + p − T p_T`, the combination that keeps appearing in the
    /// compatibility relation.
    pub fn enthalpy_defect(&self) -> f64 {
        self.e + self.p - self.state.temperature * self.p_t
    }

    /// `e_ρ − (e + p − T p_T)/ρ`: zero for an integrable Gibbs form.
    pub fn gibbs_residual(&self) -> f64 {
        self.e_rho - self.enthalpy_defect() / self.state.rho
    }

    /// Gibbs residual normalised by `max(|e_ρ|, p/ρ)`.
    pub fn gibbs_relative_residual(&self) -> f64 {
        let scale = self.e_rho.abs().max(self.p.abs() / self.state.rho).max(f64::MIN_POSITIVE);
        self.gibbs_residual().abs() / scale
    }

    /// `p_ρ > 0` and `e_T > 0`.
    pub fn is_thermodynamically_stable(&self) -> bool {
        self.p_rho > 0.0 && self.e_t > 0.0
    }

    fn check_finite(&self, model: &str) -> Result<(), ModelError> {
        let fields = [
            ("p", self.p),
            ("e", self.e),
            ("p_rho", self.p_rho),
            ("p_T", self.p_t),
            ("e_rho", self.e_rho),
            ("e_T", self.e_t),
        ];
        for (quantity, v) in fields {
            if !v.is_finite() {
                return Err(ModelError::NonFinite {
                    model: model.to_owned(),
                    quantity,
                    rho: self.state.rho,
                    temperature: self.state.temperature,
                });
            }
        }
        Ok(())
    }
}

/// Entropy per unit mass and its first derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEvaluation {
    pub s: f64,
    pub s_rho: f64,
    pub s_t: f64,
}

impl EntropyEvaluation {
    /// Derivatives fixed by the Gibbs relation: `S_T = ε_T/T`, `S_ρ = (ε_ρ − p/ρ²)/T`.
    fn from_gibbs(s: f64, ev: &StateEvaluation) -> Self {
        let t = ev.state.temperature;
        let rho = ev.state.rho;
        Self {
            s,
            s_rho: (ev.eps_rho - ev.p / (rho * rho)) / t,
            s_t: ev.eps_t / t,
        }
    }
}

/// A pair of state equations.
pub trait StateModel: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn evaluate(&self, state: ThermalState, k: &PhysicalConstants) -> Result<StateEvaluation, ModelError>;

    /// Entropy per mass, defined up to an additive constant.
    fn entropy(&self, state: ThermalState, k: &PhysicalConstants) -> Result<EntropyEvaluation, ModelError>;
}

/// Validates inputs and evaluates the model.
pub fn evaluate(
    model: &dyn StateModel,
    state: ThermalState,
    k: &PhysicalConstants,
) -> Result<StateEvaluation, ModelError> {
    state.validate()?;
    k.validate()?;
    let ev = model.evaluate(state, k)?;
    ev.check_finite(model.name())?;
    Ok(ev)
}

pub fn gibbs_entropy(
    model: &dyn StateModel,
    state: ThermalState,
    k: &PhysicalConstants,
) -> Result<EntropyEvaluation, ModelError> {
    state.validate()?;
    k.validate()?;
    model.entropy(state, k)
}

// ---------------------------------------------------------------------------
// Jüttner gas

/// Relativistic monatomic non-degenerate gas: `p = ρc²/γ`, `e = ρc²(G − 1/γ)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct JuttnerGas;

impl StateModel for JuttnerGas {
    fn name(&self) -> &str {
        "juttner"
    }

    fn evaluate(&self, state: ThermalState, k: &PhysicalConstants) -> Result<StateEvaluation, ModelError> {
        PolyatomicGas::new(Omega::Monatomic).evaluate(state, k)
    }

    fn entropy(&self, state: ThermalState, k: &PhysicalConstants) -> Result<EntropyEvaluation, ModelError> {
        PolyatomicGas::new(Omega::Monatomic).entropy(state, k)
    }
}

// ---------------------------------------------------------------------------
// Polyatomic gas

/// The dimensionless energy `ω(γ) = e/(ρc²)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Omega {
    /// `ω = G(γ) − 1/γ`, which turns the polyatomic model into the Jüttner gas.
    Monatomic,
    /// Cubic-spline table in `γ`.
    Table(CubicSpline),
    /// `ω = G − 1/γ + δ(γ)` with `δ` a cubic spline in `γ`.
    PerturbedMonatomic(CubicSpline),
}

impl Omega {
    fn name(&self) -> &'static str {
        match self {
            Omega::Monatomic => "monatomic",
            Omega::Table(_) => "table",
            Omega::PerturbedMonatomic(_) => "perturbed-monatomic",
        }
    }

    fn spline_eval(s: &CubicSpline, gamma: f64) -> Result<(f64, f64, f64), ModelError> {
        s.eval_with_derivatives(gamma).map_err(|e| match e {
            SplineError::OutOfRange { x, min, max } => ModelError::OutOfRange {
                model: "polyatomic".into(),
                coordinate: "gamma",
                value: x,
                min,
                max,
            },
            other => other.into(),
        })
    }

    /// `(ω, ω′, ω″)` at `γ`.
    pub fn eval(&self, gamma: f64) -> Result<(f64, f64, f64), ModelError> {
        let monatomic = || -> Result<(f64, f64, f64), ModelError> {
            let (g, gp, gpp) = bessel_ratio_g_derivatives(gamma)?;
            let g2 = gamma * gamma;
            Ok((g - 1.0 / gamma, gp + 1.0 / g2, gpp - 2.0 / (g2 * gamma)))
        };
        match self {
            Omega::Monatomic => monatomic(),
            Omega::Table(s) => Self::spline_eval(s, gamma),
            Omega::PerturbedMonatomic(s) => {
                let (w, wp, wpp) = monatomic()?;
                let (d, dp, dpp) = Self::spline_eval(s, gamma)?;
                Ok((w + d, wp + dp, wpp + dpp))
            }
        }
    }

    /// An antiderivative of `γ ω′(γ)`; the entropy is `(k_B/m)(Φ(γ) − ln ρ)`.
    pub fn entropy_potential(&self, gamma: f64) -> Result<f64, ModelError> {
        // ∫ γ ω' dγ = γ ω − ∫ ω dγ
        let spline_part = |s: &CubicSpline| -> Result<f64, ModelError> {
            let (w, _, _) = Self::spline_eval(s, gamma)?;
            Ok(gamma * w - s.integral_from_start(gamma)?)
        };
        let monatomic = || -> Result<f64, ModelError> {
            // γG + ln(K₂/γ), written with the scaled K₂
            let k = bessel_k_scaled_sequence(3, gamma)?;
            let g = k[3] / k[2];
            Ok(gamma * (g - 1.0) + k[2].ln() - gamma.ln())
        };
        match self {
            Omega::Monatomic => monatomic(),
            Omega::Table(s) => spline_part(s),
            Omega::PerturbedMonatomic(s) => Ok(monatomic()? + spline_part(s)?),
        }
    }
}

/// `e = ρc²ω(γ)`, `p = ρc²/γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyatomicGas {
    omega: Omega,
    name: String,
}

impl PolyatomicGas {
    pub fn new(omega: Omega) -> Self {
        let name = format!("polyatomic[{}]", omega.name());
        Self { omega, name }
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }
}

impl StateModel for PolyatomicGas {
    fn name(&self) -> &str {
        &self.name
    }

    fn evaluate(&self, state: ThermalState, k: &PhysicalConstants) -> Result<StateEvaluation, ModelError> {
        let t = state.temperature;
        let rho = state.rho;
        let c2 = k.c * k.c;
        let gamma = k.gamma(t);
        let (w, wp, _) = self.omega.eval(gamma)?;
        // dγ/dT = −γ/T
        let dgamma_dt = -gamma / t;
        let p = rho * c2 / gamma;
        let pressure = (p, c2 / gamma, p / t);
        let energy = (c2 * (w - 1.0), 0.0, c2 * wp * dgamma_dt);
        Ok(StateEvaluation::from_specific(state, k, pressure, energy))
    }

    fn entropy(&self, state: ThermalState, k: &PhysicalConstants) -> Result<EntropyEvaluation, ModelError> {
        let ev = self.evaluate(state, k)?;
        let gamma = k.gamma(state.temperature);
        let s = k.k_b / k.m * (self.omega.entropy_potential(gamma)? - state.rho.ln());
        Ok(EntropyEvaluation::from_gibbs(s, &ev))
    }
}

// ---------------------------------------------------------------------------
// User models

/// A scalar function of `(ρ, T)` that may depend on the constants.
pub type ScalarFn = Arc<dyn Fn(f64, f64, &PhysicalConstants) -> f64 + Send + Sync>;

/// `(∂/∂ρ, ∂/∂T)` of a [`ScalarFn`].
pub type GradientFn = Arc<dyn Fn(f64, f64, &PhysicalConstants) -> (f64, f64) + Send + Sync>;

/// Wraps an expression as a [`ScalarFn`]; evaluation failures become NaN and
/// are caught by the finiteness check.
pub fn expression_fn(expr: Expression) -> ScalarFn {
    Arc::new(move |rho, t, k| expr.eval(rho, t, k).unwrap_or(f64::NAN))
}

/// Central-difference gradient of a scalar function.
pub fn fd_gradient(f: &ScalarFn, rho: f64, t: f64, k: &PhysicalConstants) -> (f64, f64) {
    (
        central_difference(|x| f(x, t, k), rho),
        central_difference(|x| f(rho, x, k), t),
    )
}

/// State equations given as `p(ρ,T)` and specific internal energy `ε(ρ,T)`.
#[derive(Clone)]
pub struct UserModel {
    name: String,
    pressure: ScalarFn,
    internal_energy: ScalarFn,
    pressure_gradient: Option<GradientFn>,
    energy_gradient: Option<GradientFn>,
    entropy_reference: ThermalState,
    integrability_tol: f64,
}

impl fmt::Debug for UserModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UserModel")
            .field("name", &self.name)
            .field("analytic_pressure_gradient", &self.pressure_gradient.is_some())
            .field("analytic_energy_gradient", &self.energy_gradient.is_some())
            .field("entropy_reference", &self.entropy_reference)
            .finish()
    }
}

impl UserModel {
    pub fn new(name: impl Into<String>, pressure: ScalarFn, internal_energy: ScalarFn) -> Self {
        Self {
            name: name.into(),
            pressure,
            internal_energy,
            pressure_gradient: None,
            energy_gradient: None,
            entropy_reference: ThermalState {
                rho: 1.0,
                temperature: 1.0,
            },
            integrability_tol: 1e-6,
        }
    }

    pub fn from_expressions(name: impl Into<String>, pressure: &str, internal_energy: &str) -> Result<Self, ModelError> {
        let p = Expression::parse(pressure).map_err(ModelError::Expression)?;
        let eps = Expression::parse(internal_energy).map_err(ModelError::Expression)?;
        Ok(Self::new(name, expression_fn(p), expression_fn(eps)))
    }

    pub fn with_pressure_gradient(mut self, g: GradientFn) -> Self {
        self.pressure_gradient = Some(g);
        self
    }

    pub fn with_energy_gradient(mut self, g: GradientFn) -> Self {
        self.energy_gradient = Some(g);
        self
    }

    pub fn with_entropy_reference(mut self, reference: ThermalState) -> Self {
        self.entropy_reference = reference;
        self
    }

    /// Relative tolerance of the Gibbs-integrability gate used before the
    /// entropy is integrated.
    pub fn with_integrability_tolerance(mut self, tol: f64) -> Self {
        self.integrability_tol = tol;
        self
    }

    fn pressure_triplet(&self, rho: f64, t: f64, k: &PhysicalConstants) -> (f64, f64, f64) {
        let p = (self.pressure)(rho, t, k);
        let (pr, pt) = match &self.pressure_gradient {
            Some(g) => g(rho, t, k),
            None => fd_gradient(&self.pressure, rho, t, k),
        };
        (p, pr, pt)
    }

    fn energy_triplet(&self, rho: f64, t: f64, k: &PhysicalConstants) -> (f64, f64, f64) {
        let eps = (self.internal_energy)(rho, t, k);
        let (er, et) = match &self.energy_gradient {
            Some(g) => g(rho, t, k),
            None => fd_gradient(&self.internal_energy, rho, t, k),
        };
        (eps, er, et)
    }

    fn check_integrable(&self, ev: &StateEvaluation) -> Result<(), ModelError> {
        let residual = ev.gibbs_relative_residual();
        if residual <= self.integrability_tol {
            Ok(())
        } else {
            Err(ModelError::NonIntegrable {
                model: self.name.clone(),
                rho: ev.state.rho,
                temperature: ev.state.temperature,
                residual,
            })
        }
    }
}

impl StateModel for UserModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn evaluate(&self, state: ThermalState, k: &PhysicalConstants) -> Result<StateEvaluation, ModelError> {
        let (rho, t) = (state.rho, state.temperature);
        let ev = StateEvaluation::from_specific(
            state,
            k,
            self.pressure_triplet(rho, t, k),
            self.energy_triplet(rho, t, k),
        );
        ev.check_finite(&self.name)?;
        Ok(ev)
    }

    /// Integrates `dS` first along `ρ = ρ_ref` in `T`, then along `T = const`
    /// in `ρ`, both in logarithmic variables.
    fn entropy(&self, state: ThermalState, k: &PhysicalConstants) -> Result<EntropyEvaluation, ModelError> {
        let ev = self.evaluate(state, k)?;
        let reference = self.entropy_reference;
        self.check_integrable(&ev)?;
        self.check_integrable(&self.evaluate(reference, k)?)?;
        self.check_integrable(&self.evaluate(
            ThermalState {
                rho: reference.rho,
                temperature: state.temperature,
            },
            k,
        )?)?;

        let rule = gauss_legendre(12);
        let panels = 8;
        // S_T dT = (ε_T / T) T du with T = e^u
        let leg_t = integrate(
            |u| {
                let t = u.exp();
                self.energy_triplet(reference.rho, t, k).2
            },
            reference.temperature.ln(),
            state.temperature.ln(),
            panels,
            &rule,
        );
        // S_ρ dρ = ((ε_ρ − p/ρ²)/T) ρ dv with ρ = e^v
        let t = state.temperature;
        let leg_rho = integrate(
            |v| {
                let rho = v.exp();
                let eps_rho = self.energy_triplet(rho, t, k).1;
                let p = (self.pressure)(rho, t, k);
                (eps_rho - p / (rho * rho)) / t * rho
            },
            reference.rho.ln(),
            state.rho.ln(),
            panels,
            &rule,
        );
        let s = leg_t + leg_rho;
        if !s.is_finite() {
            return Err(ModelError::NonFinite {
                model: self.name.clone(),
                quantity: "S",
                rho: state.rho,
                temperature: state.temperature,
            });
        }
        Ok(EntropyEvaluation::from_gibbs(s, &ev))
    }
}
