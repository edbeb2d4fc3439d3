//! Equilibrium closures `(a, b)` of the triple tensor, the compatibility
//! constraint with the Eckart laws, and the production coefficients
//! `(a₁, a₂, a₃)`.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covariant::CovariantError;
use crate::expr::Expression;
use crate::numeric::central_difference;
use crate::special_functions::bessel_ratio_g_derivatives;
use crate::spline::CubicSpline;
use crate::state_models::{
    evaluate, expression_fn, fd_gradient, GradientFn, ModelError, Omega, PhysicalConstants, ScalarFn,
    StateEvaluation, StateModel, ThermalState,
};

/// Relative tolerance for calling a closure compatible, applied to
/// `max(|a|, |b|, ρc²)`.
pub const DEFAULT_COMPATIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosureError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Covariant(#[from] CovariantError),
    #[error("p_rho vanishes at rho = {rho}, T = {temperature}")]
    SingularPressureDerivative { rho: f64, temperature: f64 },
    #[error("e_T vanishes at rho = {rho}, T = {temperature}")]
    DegenerateHeatCapacity { rho: f64, temperature: f64 },
    #[error("transport coefficient {0} must be strictly positive")]
    ZeroTransport(&'static str),
    #[error("transport coefficient {name} is negative ({value})")]
    NegativeTransport { name: &'static str, value: f64 },
    #[error("closure {0} needs an omega(gamma) model")]
    MissingOmega(&'static str),
    #[error("closure {closure}: {quantity} is not finite at rho = {rho}, T = {temperature}")]
    NonFinite {
        closure: String,
        quantity: &'static str,
        rho: f64,
        temperature: f64,
    },
    #[error("expression error: {0}")]
    Expression(String),
}

/// `a`, `b` and their first derivatives at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureValues {
    pub a: f64,
    pub a_rho: f64,
    pub a_t: f64,
    pub b: f64,
    pub b_rho: f64,
    pub b_t: f64,
}

impl ClosureValues {
    fn check_finite(&self, closure: &str, state: ThermalState) -> Result<(), ClosureError> {
        let fields = [
            ("a", self.a),
            ("a_rho", self.a_rho),
            ("a_T", self.a_t),
            ("b", self.b),
            ("b_rho", self.b_rho),
            ("b_T", self.b_t),
        ];
        for (quantity, v) in fields {
            if !v.is_finite() {
                return Err(ClosureError::NonFinite {
                    closure: closure.to_owned(),
                    quantity,
                    rho: state.rho,
                    temperature: state.temperature,
                });
            }
        }
        Ok(())
    }
}

/// Heat conductivity `χ`, shear viscosity `μ`, bulk viscosity `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransportCoefficients {
    pub chi: f64,
    pub mu: f64,
    pub nu: f64,
}

impl TransportCoefficients {
    pub fn new(chi: f64, mu: f64, nu: f64) -> Self {
        Self { chi, mu, nu }
    }

    fn named(&self) -> [(&'static str, f64); 3] {
        [("chi", self.chi), ("mu", self.mu), ("nu", self.nu)]
    }

    pub fn validate(&self) -> Result<(), ClosureError> {
        for (name, value) in self.named() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(ClosureError::NegativeTransport { name, value });
            }
        }
        Ok(())
    }

    pub fn require_positive(&self) -> Result<(), ClosureError> {
        self.validate()?;
        for (name, value) in self.named() {
            if value == 0.0 {
                return Err(ClosureError::ZeroTransport(name));
            }
        }
        Ok(())
    }
}

/// Coefficients of the production tensor. The isotropic coefficient `a₄`
/// drops out under the traceless projection and is not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductionCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// The same coefficients under the symbols used in the kinetic literature:
/// `B₁^π = −a₃c²/4`, `B₄ = a₁`, `B₃ = a₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LmrSymbols {
    pub b1_pi: f64,
    pub b3: f64,
    pub b4: f64,
}

impl ProductionCoefficients {
    pub fn lmr_symbols(&self, c: f64) -> LmrSymbols {
        LmrSymbols {
            b1_pi: -self.a3 * c * c / 4.0,
            b3: self.a2,
            b4: self.a1,
        }
    }
}

/// The two scalar fields `a(ρ,T)`, `b(ρ,T)` of the equilibrium triple tensor.
pub trait EquilibriumClosure: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn evaluate(
        &self,
        state: ThermalState,
        model: &dyn StateModel,
        k: &PhysicalConstants,
    ) -> Result<ClosureValues, ClosureError>;
}

/// Validated closure evaluation.
pub fn evaluate_closure(
    closure: &dyn EquilibriumClosure,
    state: ThermalState,
    model: &dyn StateModel,
    k: &PhysicalConstants,
) -> Result<ClosureValues, ClosureError> {
    state.validate()?;
    k.validate()?;
    let v = closure.evaluate(state, model, k)?;
    v.check_finite(&closure.name(), state)?;
    Ok(v)
}

fn check_p_rho(ev: &StateEvaluation) -> Result<(), ClosureError> {
    if ev.p_rho == 0.0 || !ev.p_rho.is_finite() {
        Err(ClosureError::SingularPressureDerivative {
            rho: ev.state.rho,
            temperature: ev.state.temperature,
        })
    } else {
        Ok(())
    }
}

/// `¼{−b + (e + p − T p_T) b_ρ/p_ρ + T b_T}`: the value of `a` that makes a
/// given `b` compatible.
pub fn a_from_b(b: f64, b_rho: f64, b_t: f64, ev: &StateEvaluation) -> Result<f64, ClosureError> {
    check_p_rho(ev)?;
    Ok(0.25 * (-b + ev.enthalpy_defect() * b_rho / ev.p_rho + ev.state.temperature * b_t))
}

/// `a − ¼{−b + (e + p − T p_T) b_ρ/p_ρ + T b_T}`.
pub fn compatibility_residual(v: &ClosureValues, ev: &StateEvaluation) -> Result<f64, ClosureError> {
    Ok(v.a - a_from_b(v.b, v.b_rho, v.b_t, ev)?)
}

/// `max(|a|, |b|, ρc²)`, the scale against which residuals are judged.
pub fn compatibility_scale(v: &ClosureValues, ev: &StateEvaluation, k: &PhysicalConstants) -> f64 {
    v.a.abs().max(v.b.abs()).max(ev.state.rho * k.c * k.c)
}

/// Evaluates model and closure, then the compatibility residual.
pub fn closure_compatibility_residual(
    closure: &dyn EquilibriumClosure,
    state: ThermalState,
    model: &dyn StateModel,
    k: &PhysicalConstants,
) -> Result<f64, ClosureError> {
    let ev = evaluate(model, state, k)?;
    let v = evaluate_closure(closure, state, model, k)?;
    compatibility_residual(&v, &ev)
}

/// Generic production coefficients:
/// `a₁ = (b_ρp_T − b_Tp_ρ)/(p_ρχ)`, `a₂ = −b/μ`,
/// `a₃ = −(4/(c²ν))[a + 2b/3 − a_ρρ − (a_T/e_T)T p_T]`.
pub fn production_coefficients(
    v: &ClosureValues,
    ev: &StateEvaluation,
    transport: &TransportCoefficients,
    k: &PhysicalConstants,
) -> Result<ProductionCoefficients, ClosureError> {
    transport.require_positive()?;
    check_p_rho(ev)?;
    if ev.e_t == 0.0 {
        return Err(ClosureError::DegenerateHeatCapacity {
            rho: ev.state.rho,
            temperature: ev.state.temperature,
        });
    }
    let (rho, t) = (ev.state.rho, ev.state.temperature);
    let c2 = k.c * k.c;
    Ok(ProductionCoefficients {
        a1: (v.b_rho * ev.p_t - v.b_t * ev.p_rho) / (ev.p_rho * transport.chi),
        a2: -v.b / transport.mu,
        a3: -4.0 / (c2 * transport.nu)
            * (v.a + 2.0 * v.b / 3.0 - v.a_rho * rho - v.a_t / ev.e_t * t * ev.p_t),
    })
}

/// The two conditions obtained from the independence of `∂ρ` and `∂T` in the
/// heat-flux projection:
/// `r₁ = (e+p)b_ρ − (4a+b)p_ρ − χa₁Tp_ρ`,
/// `r₂ = (e+p)b_T − (4a+b)p_T + χa₁(e+p−Tp_T)`.
pub fn heatflux_condition_residuals(v: &ClosureValues, ev: &StateEvaluation, chi: f64, a1: f64) -> (f64, f64) {
    let t = ev.state.temperature;
    let enthalpy = ev.e + ev.p;
    let r1 = enthalpy * v.b_rho - (4.0 * v.a + v.b) * ev.p_rho - chi * a1 * t * ev.p_rho;
    let r2 = enthalpy * v.b_t - (4.0 * v.a + v.b) * ev.p_t + chi * a1 * ev.enthalpy_defect();
    (r1, r2)
}

/// Monatomic production coefficients in closed form.
///
/// `a₁ = −(p/(χT))(γ + 5G − γG²)`, `a₂ = −pG/μ`,
/// `a₃ = −(4p/(3c²ν))(2G − 3(γ + G(6 − γG))/(γ(γ + G(5 − γG)) − 1))`,
/// evaluated with `γ + 5G − γG² = −γG'` so that large `γ` keeps its digits.
pub fn monatomic_production(
    state: ThermalState,
    transport: &TransportCoefficients,
    k: &PhysicalConstants,
) -> Result<ProductionCoefficients, ClosureError> {
    transport.require_positive()?;
    let gamma = k.gamma(state.temperature);
    let (g, gp, _) = bessel_ratio_g_derivatives(gamma).map_err(ModelError::from)?;
    let c2 = k.c * k.c;
    let p = state.rho * c2 / gamma;
    let t = state.temperature;
    let a1 = p / (transport.chi * t) * gamma * gp;
    let a2 = -p * g / transport.mu;
    let frac = 3.0 * (g - gamma * gp) / (-gamma * gamma * gp - 1.0);
    let a3 = -4.0 * p / (3.0 * c2 * transport.nu) * (2.0 * g - frac);
    Ok(ProductionCoefficients { a1, a2, a3 })
}

/// Specialisation for `a`, `b`, `e`, `p` linear in `ρ` with `p = ρk_BT/m`:
/// `a₁ = −(4a − b e/p)/(χT)`, `a₂ = −b/μ`, `a₃ = −(4/(c²ν))(2b/3 − (a_T/e_T)p)`.
pub fn polyatomic_production(
    v: &ClosureValues,
    ev: &StateEvaluation,
    transport: &TransportCoefficients,
    k: &PhysicalConstants,
) -> Result<ProductionCoefficients, ClosureError> {
    transport.require_positive()?;
    let t = ev.state.temperature;
    Ok(ProductionCoefficients {
        a1: -(4.0 * v.a - v.b * ev.e / ev.p) / (transport.chi * t),
        a2: -v.b / transport.mu,
        a3: -4.0 / (k.c * k.c * transport.nu) * (2.0 * v.b / 3.0 - v.a_t / ev.e_t * ev.p),
    })
}

// ---------------------------------------------------------------------------
// Built-in closures

/// `d/dT = −(γ/T) d/dγ`.
fn t_derivative(d_dgamma: f64, gamma: f64, t: f64) -> f64 {
    -gamma / t * d_dgamma
}

/// `a = ρc²(1/4 + G/γ)`, `b = c²Gρ/γ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MonatomicJuttner;

impl EquilibriumClosure for MonatomicJuttner {
    fn name(&self) -> String {
        "monatomic_juttner".into()
    }

    fn evaluate(&self, state: ThermalState, _: &dyn StateModel, k: &PhysicalConstants) -> Result<ClosureValues, ClosureError> {
        let gamma = k.gamma(state.temperature);
        let (g, gp, _) = bessel_ratio_g_derivatives(gamma).map_err(ModelError::from)?;
        let c2 = k.c * k.c;
        let rho = state.rho;
        let g_over_gamma = g / gamma;
        let d_g_over_gamma = gp / gamma - g / (gamma * gamma);
        let b_t = t_derivative(rho * c2 * d_g_over_gamma, gamma, state.temperature);
        Ok(ClosureValues {
            a: rho * c2 * (0.25 + g_over_gamma),
            a_rho: c2 * (0.25 + g_over_gamma),
            a_t: b_t,
            b: rho * c2 * g_over_gamma,
            b_rho: c2 * g_over_gamma,
            b_t,
        })
    }
}

/// One-function closure driven by `ω(γ)`:
/// `a = ¼c²ρ(1/γ² + ω/γ + ω² − ω′)`, `b = c²ρ(γω + 1)/γ²`.
#[derive(Debug, Clone)]
pub struct PolyatomicAcpr {
    omega: Omega,
}

impl PolyatomicAcpr {
    pub fn new(omega: Omega) -> Self {
        Self { omega }
    }
}

impl EquilibriumClosure for PolyatomicAcpr {
    fn name(&self) -> String {
        "polyatomic_acpr".into()
    }

    fn evaluate(&self, state: ThermalState, _: &dyn StateModel, k: &PhysicalConstants) -> Result<ClosureValues, ClosureError> {
        let gamma = k.gamma(state.temperature);
        let (w, wp, wpp) = self.omega.eval(gamma)?;
        let c2 = k.c * k.c;
        let (rho, t) = (state.rho, state.temperature);
        let g2 = gamma * gamma;
        let g3 = g2 * gamma;
        let a_hat = 0.25 * (1.0 / g2 + w / gamma + w * w - wp);
        let da_hat = 0.25 * (-2.0 / g3 + wp / gamma - w / g2 + 2.0 * w * wp - wpp);
        let b_hat = w / gamma + 1.0 / g2;
        let db_hat = wp / gamma - w / g2 - 2.0 / g3;
        Ok(ClosureValues {
            a: c2 * rho * a_hat,
            a_rho: c2 * a_hat,
            a_t: t_derivative(c2 * rho * da_hat, gamma, t),
            b: c2 * rho * b_hat,
            b_rho: c2 * b_hat,
            b_t: t_derivative(c2 * rho * db_hat, gamma, t),
        })
    }
}

/// Closure with `b = ρc²β(γ)` and `a` fixed by the compatibility relation
/// for the `ω(γ)` gas: `a = ¼ρc²(β(γω − 1) − γβ′)`.
///
/// Without a `β` table, `β = (γω + 1)/γ²`, which reproduces the one-function
/// closure.
#[derive(Debug, Clone)]
pub struct PolyatomicPr {
    omega: Omega,
    beta: Option<CubicSpline>,
}

impl PolyatomicPr {
    pub fn new(omega: Omega) -> Self {
        Self { omega, beta: None }
    }

    pub fn with_beta_table(mut self, beta: CubicSpline) -> Self {
        self.beta = Some(beta);
        self
    }

    fn beta(&self, gamma: f64, w: (f64, f64, f64)) -> Result<(f64, f64, f64), ClosureError> {
        match &self.beta {
            Some(s) => Ok(s.eval_with_derivatives(gamma).map_err(ModelError::from)?),
            None => {
                let (w, wp, wpp) = w;
                let (g2, g3) = (gamma * gamma, gamma * gamma * gamma);
                Ok((
                    w / gamma + 1.0 / g2,
                    wp / gamma - w / g2 - 2.0 / g3,
                    wpp / gamma - 2.0 * wp / g2 + 2.0 * w / g3 + 6.0 / (g2 * g2),
                ))
            }
        }
    }
}

impl EquilibriumClosure for PolyatomicPr {
    fn name(&self) -> String {
        "polyatomic_pr".into()
    }

    fn evaluate(&self, state: ThermalState, _: &dyn StateModel, k: &PhysicalConstants) -> Result<ClosureValues, ClosureError> {
        let gamma = k.gamma(state.temperature);
        let omega = self.omega.eval(gamma)?;
        let (w, wp, _) = omega;
        let (beta, bp, bpp) = self.beta(gamma, omega)?;
        let c2 = k.c * k.c;
        let (rho, t) = (state.rho, state.temperature);
        let a_hat = 0.25 * (beta * (gamma * w - 1.0) - gamma * bp);
        let da_hat = 0.25 * (bp * (gamma * w - 1.0) + beta * (w + gamma * wp) - bp - gamma * bpp);
        Ok(ClosureValues {
            a: c2 * rho * a_hat,
            a_rho: c2 * a_hat,
            a_t: t_derivative(c2 * rho * da_hat, gamma, t),
            b: c2 * rho * beta,
            b_rho: c2 * beta,
            b_t: t_derivative(c2 * rho * bp, gamma, t),
        })
    }
}

/// `a = c₁`, `b = c₂T − 4c₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GerochLindblom {
    pub c1: f64,
    pub c2: f64,
}

impl GerochLindblom {
    pub fn new(c1: f64, c2: f64) -> Self {
        Self { c1, c2 }
    }

    /// `a₁ = −c₂/χ`.
    pub fn a1(&self, chi: f64) -> f64 {
        -self.c2 / chi
    }
}

impl EquilibriumClosure for GerochLindblom {
    fn name(&self) -> String {
        format!("geroch_lindblom({}, {})", self.c1, self.c2)
    }

    fn evaluate(&self, state: ThermalState, _: &dyn StateModel, _: &PhysicalConstants) -> Result<ClosureValues, ClosureError> {
        Ok(ClosureValues {
            a: self.c1,
            a_rho: 0.0,
            a_t: 0.0,
            b: self.c2 * state.temperature - 4.0 * self.c1,
            b_rho: 0.0,
            b_t: self.c2,
        })
    }
}

/// User-supplied `b`, and optionally `a`. Without `a`, the compatible value
/// is computed from `b`, with its derivatives by finite differences.
#[derive(Clone)]
pub struct UserClosure {
    name: String,
    b: ScalarFn,
    b_gradient: Option<GradientFn>,
    a: Option<ScalarFn>,
    a_gradient: Option<GradientFn>,
}

impl fmt::Debug for UserClosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UserClosure")
            .field("name", &self.name)
            .field("explicit_a", &self.a.is_some())
            .field("analytic_b_gradient", &self.b_gradient.is_some())
            .finish()
    }
}

impl UserClosure {
    pub fn new(name: impl Into<String>, b: ScalarFn) -> Self {
        Self {
            name: name.into(),
            b,
            b_gradient: None,
            a: None,
            a_gradient: None,
        }
    }

    pub fn from_expressions(name: impl Into<String>, b: &str, a: Option<&str>) -> Result<Self, ClosureError> {
        let b = Expression::parse(b).map_err(ClosureError::Expression)?;
        let mut closure = Self::new(name, expression_fn(b));
        if let Some(a) = a {
            let a = Expression::parse(a).map_err(ClosureError::Expression)?;
            closure.a = Some(expression_fn(a));
        }
        Ok(closure)
    }

    pub fn with_b_gradient(mut self, g: GradientFn) -> Self {
        self.b_gradient = Some(g);
        self
    }

    pub fn with_a(mut self, a: ScalarFn, gradient: Option<GradientFn>) -> Self {
        self.a = Some(a);
        self.a_gradient = gradient;
        self
    }

    fn b_triplet(&self, rho: f64, t: f64, k: &PhysicalConstants) -> (f64, f64, f64) {
        let b = (self.b)(rho, t, k);
        let (br, bt) = match &self.b_gradient {
            Some(g) => g(rho, t, k),
            None => fd_gradient(&self.b, rho, t, k),
        };
        (b, br, bt)
    }

    fn compatible_a(&self, rho: f64, t: f64, model: &dyn StateModel, k: &PhysicalConstants) -> Result<f64, ClosureError> {
        let ev = evaluate(model, ThermalState { rho, temperature: t }, k)?;
        let (b, br, bt) = self.b_triplet(rho, t, k);
        a_from_b(b, br, bt, &ev)
    }
}

impl EquilibriumClosure for UserClosure {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn evaluate(&self, state: ThermalState, model: &dyn StateModel, k: &PhysicalConstants) -> Result<ClosureValues, ClosureError> {
        let (rho, t) = (state.rho, state.temperature);
        let (b, b_rho, b_t) = self.b_triplet(rho, t, k);
        let (a, a_rho, a_t) = match &self.a {
            Some(a) => {
                let (ar, at) = match &self.a_gradient {
                    Some(g) => g(rho, t, k),
                    None => fd_gradient(a, rho, t, k),
                };
                (a(rho, t, k), ar, at)
            }
            None => {
                let a = self.compatible_a(rho, t, model, k)?;
                let failure = RefCell::new(None);
                let shifted = |r: f64, tt: f64| match self.compatible_a(r, tt, model, k) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                };
                let ar = central_difference(|x| shifted(x, t), rho);
                let at = central_difference(|x| shifted(rho, x), t);
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                (a, ar, at)
            }
        };
        Ok(ClosureValues { a, a_rho, a_t, b, b_rho, b_t })
    }
}

/// `b(ρ,T) = Σⱼ ρ^{pⱼ} sⱼ(ln T)` with cubic splines `sⱼ`; analytic gradient.
#[derive(Debug, Clone)]
pub struct SeparableB {
    terms: Vec<(f64, CubicSpline)>,
}

impl SeparableB {
    pub fn new(terms: Vec<(f64, CubicSpline)>) -> Self {
        Self { terms }
    }

    pub fn value_and_gradient(&self, rho: f64, t: f64) -> (f64, f64, f64) {
        let lt = t.ln();
        let (mut b, mut br, mut bt) = (0.0, 0.0, 0.0);
        for (power, s) in &self.terms {
            let (v, d, _) = s.eval_with_derivatives(lt).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            let rp = rho.powf(*power);
            b += rp * v;
            br += power * rho.powf(power - 1.0) * v;
            bt += rp * d / t;
        }
        (b, br, bt)
    }

    /// Wraps as a user closure whose `a` is computed from compatibility.
    pub fn into_closure(self, name: impl Into<String>) -> UserClosure {
        let shared = Arc::new(self);
        let value = Arc::clone(&shared);
        UserClosure::new(name, Arc::new(move |r, t, _| value.value_and_gradient(r, t).0)).with_b_gradient(Arc::new(
            move |r, t, _| {
                let (_, br, bt) = shared.value_and_gradient(r, t);
                (br, bt)
            },
        ))
    }
}

/// Scales `a` by `1 + δa` and `b` by `1 + δb`, derivatives included.
#[derive(Debug, Clone)]
pub struct Perturbed {
    inner: Arc<dyn EquilibriumClosure>,
    a_factor: f64,
    b_factor: f64,
}

impl Perturbed {
    pub fn new(inner: Arc<dyn EquilibriumClosure>, delta_a: f64, delta_b: f64) -> Self {
        Self {
            inner,
            a_factor: 1.0 + delta_a,
            b_factor: 1.0 + delta_b,
        }
    }
}

impl EquilibriumClosure for Perturbed {
    fn name(&self) -> String {
        format!("perturbed[{}]", self.inner.name())
    }

    fn evaluate(&self, state: ThermalState, model: &dyn StateModel, k: &PhysicalConstants) -> Result<ClosureValues, ClosureError> {
        let v = self.inner.evaluate(state, model, k)?;
        Ok(ClosureValues {
            a: v.a * self.a_factor,
            a_rho: v.a_rho * self.a_factor,
            a_t: v.a_t * self.a_factor,
            b: v.b * self.b_factor,
            b_rho: v.b_rho * self.b_factor,
            b_t: v.b_t * self.b_factor,
        })
    }
}

/// Names of the built-in closures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClosureKind {
    MonatomicJuttner,
    PolyatomicPr,
    PolyatomicAcpr,
    GerochLindblom { c1: f64, c2: f64 },
}

pub fn builtin_closure(kind: ClosureKind, omega: Option<&Omega>) -> Result<Arc<dyn EquilibriumClosure>, ClosureError> {
    Ok(match kind {
        ClosureKind::MonatomicJuttner => Arc::new(MonatomicJuttner),
        ClosureKind::PolyatomicPr => Arc::new(PolyatomicPr::new(
            omega.ok_or(ClosureError::MissingOmega("polyatomic_pr"))?.clone(),
        )),
        ClosureKind::PolyatomicAcpr => Arc::new(PolyatomicAcpr::new(
            omega.ok_or(ClosureError::MissingOmega("polyatomic_acpr"))?.clone(),
        )),
        ClosureKind::GerochLindblom { c1, c2 } => Arc::new(GerochLindblom::new(c1, c2)),
    })
}
