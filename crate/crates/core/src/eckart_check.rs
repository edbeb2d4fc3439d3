//! Pointwise check that the first Maxwellian iterate of the triple-tensor
//! balance reproduces the Eckart constitutive laws.
//!
//! A [`FieldPoint`] carries `(ρ, T, U)` and their exact first derivatives.
//! Proper-time derivatives are replaced by the values implied by the
//! equilibrium conservation laws, the divergence `∂_αA_E^{α⟨βγ⟩}` is
//! evaluated by forward-mode differentiation of the assembly, and the
//! production built from the Eckart fields is subtracted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure::{
    compatibility_residual, compatibility_scale, ClosureError, ClosureValues, ProductionCoefficients,
    TransportCoefficients, DEFAULT_COMPATIBILITY_TOL,
};
use crate::covariant::{
    contract, deviatoric3, equilibrium_triple_generic, lower, packed_index, production_unchecked, projector, CovariantError,
    Covector, Dual, FourVector, NoneqFields, SymTensor2, VelocityGradient, METRIC,
};
use crate::state_models::{PhysicalConstants, StateEvaluation, ThermalState};

/// Tolerance of `U_β∂_αU^β = 0`, relative to `|U|·max|∂U|`.
pub const GRADIENT_NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EckartError {
    #[error(transparent)]
    Covariant(#[from] CovariantError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error("velocity gradient is not tangent to the unit hyperboloid: U_b dU^b = {0:.3e}")]
    GradientNotTangent(f64),
    #[error("degenerate state: {0} vanishes")]
    Degenerate(&'static str),
}

/// State, four-velocity and first derivatives at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldPoint {
    pub state: ThermalState,
    pub u: FourVector,
    pub grad_rho: Covector,
    pub grad_t: Covector,
    pub grad_u: VelocityGradient,
}

impl FieldPoint {
    /// A homogeneous point: every gradient zero.
    pub fn homogeneous(state: ThermalState, u: FourVector) -> Self {
        Self {
            state,
            u,
            grad_rho: [0.0; 4],
            grad_t: [0.0; 4],
            grad_u: [[0.0; 4]; 4],
        }
    }

    pub fn validate(&self, c: f64) -> Result<(), EckartError> {
        self.state.validate().map_err(ClosureError::from)?;
        self.u.check_normalized(c)?;
        let ul = self.u.lower();
        let du_max = self.grad_u.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        let u_max = self.u.0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for row in &self.grad_u {
            let v = contract(&ul, row);
            if v.abs() > GRADIENT_NORMALIZATION_TOL * u_max * du_max.max(f64::MIN_POSITIVE) {
                return Err(EckartError::GradientNotTangent(v));
            }
        }
        Ok(())
    }

    /// Expansion `θ = ∂_αU^α`.
    pub fn expansion(&self) -> f64 {
        (0..4).map(|a| self.grad_u[a][a]).sum()
    }

    /// `U̇^β = U^α∂_αU^β` from the supplied gradient.
    pub fn kinematic_acceleration(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (b, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|a| self.u.0[a] * self.grad_u[a][b]).sum();
        }
        out
    }

    /// `max(|∂ρ|/ρ, |∂T|/T, |∂U|/c)`.
    pub fn gradient_norm(&self, c: f64) -> f64 {
        let r = self.grad_rho.iter().fold(0.0f64, |m, x| m.max(x.abs())) / self.state.rho;
        let t = self.grad_t.iter().fold(0.0f64, |m, x| m.max(x.abs())) / self.state.temperature;
        let u = self.grad_u.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs())) / c;
        r.max(t).max(u)
    }

    /// Multiplies every gradient by `s`.
    pub fn scale_gradients(&self, s: f64) -> Self {
        let mut out = *self;
        out.grad_rho = self.grad_rho.map(|x| x * s);
        out.grad_t = self.grad_t.map(|x| x * s);
        out.grad_u = self.grad_u.map(|row| row.map(|x| x * s));
        out
    }
}

/// Proper-time derivatives implied by the equilibrium conservation laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaterialDerivatives {
    pub rho_dot: f64,
    pub t_dot: f64,
    pub u_dot: [f64; 4],
}

/// `ρ̇ = −ρθ`, `Ṫ = −(Tp_T/e_T)θ`, `U̇^β = −(c²/(e+p))h^{μβ}∂_μp`.
pub fn eliminate_material_derivatives(
    pt: &FieldPoint,
    ev: &StateEvaluation,
    c: f64,
) -> Result<MaterialDerivatives, EckartError> {
    if ev.e_t == 0.0 {
        return Err(EckartError::Degenerate("e_T"));
    }
    let enthalpy = ev.e + ev.p;
    if enthalpy == 0.0 {
        return Err(EckartError::Degenerate("e + p"));
    }
    let h = projector(&pt.u, c)?;
    let theta = pt.expansion();
    let grad_p: Covector = std::array::from_fn(|a| ev.p_rho * pt.grad_rho[a] + ev.p_t * pt.grad_t[a]);
    let hp = h.contract_right(&grad_p);
    Ok(MaterialDerivatives {
        rho_dot: -pt.state.rho * theta,
        t_dot: -pt.state.temperature * ev.p_t / ev.e_t * theta,
        u_dot: hp.map(|x| -c * c / enthalpy * x),
    })
}

/// Eckart fields for a given acceleration `U̇`:
/// `π = −νθ`, `q^β = −χh^{αβ}(∂_αT − TU̇_α/c²)`,
/// `t^{βδ} = 2μ (∂_{(α}U_{μ)})^{⟨βδ⟩₃}`.
pub fn eckart_fields_with_acceleration(
    pt: &FieldPoint,
    transport: &TransportCoefficients,
    u_dot: &[f64; 4],
    c: f64,
) -> Result<NoneqFields, EckartError> {
    let h = projector(&pt.u, c)?;
    let t = pt.state.temperature;
    let u_dot_lower = lower(u_dot);
    let x: Covector = std::array::from_fn(|a| pt.grad_t[a] - t / (c * c) * u_dot_lower[a]);
    let q = h.contract_right(&x).map(|v| -transport.chi * v);
    // ∂_αU_μ with both indices raised: g^{αα}∂_αU^μ
    let raised = SymTensor2::from_fn(|a, m| 0.5 * (METRIC[a] * pt.grad_u[a][m] + METRIC[m] * pt.grad_u[m][a]));
    let shear = deviatoric3(&raised, &h).scale(2.0 * transport.mu);
    Ok(NoneqFields {
        q: FourVector(q),
        t: shear,
        pi: -transport.nu * pt.expansion(),
    })
}

/// Eckart fields with the acceleration eliminated through the momentum
/// balance.
pub fn eckart_constitutive(
    pt: &FieldPoint,
    transport: &TransportCoefficients,
    ev: &StateEvaluation,
    c: f64,
) -> Result<NoneqFields, EckartError> {
    transport.validate()?;
    let md = eliminate_material_derivatives(pt, ev, c)?;
    eckart_fields_with_acceleration(pt, transport, &md.u_dot, c)
}

/// The three projections of `∂_αA_E^{α⟨βγ⟩} − I^{⟨βγ⟩}`, each contracted
/// with the unit vector `U/c` so that all share the scale `ρc³‖grad‖`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionResiduals {
    /// `û_βû_γ R^{βγ}`.
    pub trace: f64,
    /// `h_{δβ}R^{βγ}û_γ`, covariant.
    pub heat: Covector,
    /// `R^{⟨βγ⟩₃}`.
    pub shear: SymTensor2,
    pub gradient_norm: f64,
    /// `ρc³‖grad‖∞`.
    pub scale: f64,
    /// Set when the closure fails the compatibility relation at the point.
    pub warning: Option<String>,
}

impl ProjectionResiduals {
    pub fn heat_norm(&self) -> f64 {
        self.heat.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn shear_norm(&self) -> f64 {
        self.shear.norm()
    }

    /// Largest of the three residual norms divided by the scale; zero for a
    /// homogeneous point.
    pub fn max_relative(&self) -> f64 {
        let m = self.trace.abs().max(self.heat_norm()).max(self.shear_norm());
        if self.scale > 0.0 {
            m / self.scale
        } else {
            m
        }
    }
}

/// Divergence `∂_αA^{α⟨βγ⟩}` for given derivatives of `a`, `b`, `U`.
fn triple_divergence(
    v: &ClosureValues,
    grad_a: &Covector,
    grad_b: &Covector,
    u: &FourVector,
    grad_u: &VelocityGradient,
    c: f64,
) -> SymTensor2 {
    let mut div = SymTensor2::ZERO;
    for al in 0..4 {
        let a = Dual::new(v.a, grad_a[al]);
        let b = Dual::new(v.b, grad_b[al]);
        let ud: [Dual; 4] = std::array::from_fn(|m| Dual::new(u.0[m], grad_u[al][m]));
        let slab = equilibrium_triple_generic(a, b, &ud, c);
        div = div + SymTensor2::from_fn(|be, ga| slab[al][packed_index(be, ga)].derivative);
    }
    div
}

/// Residuals of the first Maxwellian iterate at a field point.
pub fn projection_residuals(
    pt: &FieldPoint,
    v: &ClosureValues,
    prod: &ProductionCoefficients,
    transport: &TransportCoefficients,
    ev: &StateEvaluation,
    k: &PhysicalConstants,
) -> Result<ProjectionResiduals, EckartError> {
    let c = k.c;
    let c2 = c * c;
    pt.validate(c)?;
    let md = eliminate_material_derivatives(pt, ev, c)?;
    let ul = pt.u.lower();

    // replace the proper-time part of each gradient by its eliminated value
    let rho_dot = contract(&pt.grad_rho, &pt.u.0);
    let t_dot = contract(&pt.grad_t, &pt.u.0);
    let u_dot = pt.kinematic_acceleration();
    let grad_rho: Covector = std::array::from_fn(|a| pt.grad_rho[a] + ul[a] * (md.rho_dot - rho_dot) / c2);
    let grad_t: Covector = std::array::from_fn(|a| pt.grad_t[a] + ul[a] * (md.t_dot - t_dot) / c2);
    let grad_u: VelocityGradient =
        std::array::from_fn(|a| std::array::from_fn(|m| pt.grad_u[a][m] + ul[a] * (md.u_dot[m] - u_dot[m]) / c2));

    let grad_a: Covector = std::array::from_fn(|a| v.a_rho * grad_rho[a] + v.a_t * grad_t[a]);
    let grad_b: Covector = std::array::from_fn(|a| v.b_rho * grad_rho[a] + v.b_t * grad_t[a]);
    let divergence = triple_divergence(v, &grad_a, &grad_b, &pt.u, &grad_u, c);

    let fields = eckart_fields_with_acceleration(pt, transport, &md.u_dot, c)?;
    let production = production_unchecked(prod, &fields, &pt.u, c);
    let r = divergence - production;

    let h = projector(&pt.u, c)?;
    let uhat = ul.map(|x| x / c);
    let trace = r.contract_covectors(&uhat, &uhat);
    let ru = r.contract_right(&uhat);
    let h_lower = h.lower_both();
    let heat: Covector = std::array::from_fn(|d| (0..4).map(|b| h_lower.get(d, b) * ru[b]).sum());
    let shear = deviatoric3(&r, &h);

    let gradient_norm = pt.gradient_norm(c);
    let compat = compatibility_residual(v, ev)?;
    let warning = (compat.abs() > DEFAULT_COMPATIBILITY_TOL * compatibility_scale(v, ev, k))
        .then(|| format!("closure violates the compatibility relation (residual {compat:.3e})"));
    Ok(ProjectionResiduals {
        trace,
        heat,
        shear,
        gradient_norm,
        scale: pt.state.rho * c2 * c * gradient_norm,
        warning,
    })
}

// ---------------------------------------------------------------------------
// Analytic field family

/// Bounds of the randomised field family
/// `ρ = ρ₀(1 + A·bump)`, `T = T₀(1 + B·bump)`,
/// `vx = c(β₀ + β₁·bump)`, `vy = c β₂·bump`,
/// with `bump = exp(−t²/(2σ_t²) − x²/(2σ_x²))` and `x⁰ = ct`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldFamily {
    pub rho_range: [f64; 2],
    pub temperature_range: [f64; 2],
    /// Largest `|A|`, `|B|`.
    pub amplitude: f64,
    /// Largest `|β₀|`.
    pub drift: f64,
    /// Largest `|β₁|`, `|β₂|`.
    pub swirl: f64,
    pub sigma_t: f64,
    pub sigma_x: f64,
}

impl Default for FieldFamily {
    fn default() -> Self {
        Self {
            rho_range: [0.1, 10.0],
            temperature_range: [0.05, 5.0],
            amplitude: 0.1,
            drift: 0.5,
            swirl: 0.2,
            sigma_t: 1.0,
            sigma_x: 1.0,
        }
    }
}

/// Parameters of one member of the family plus the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub rho0: f64,
    pub t0: f64,
    pub amp_rho: f64,
    pub amp_t: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub time: f64,
    pub x: f64,
}

impl FieldFamily {
    pub fn validate(&self) -> Result<(), String> {
        let ok = self.rho_range[0] > 0.0
            && self.rho_range[1] >= self.rho_range[0]
            && self.temperature_range[0] > 0.0
            && self.temperature_range[1] >= self.temperature_range[0]
            && (0.0..=0.5).contains(&self.amplitude)
            && self.drift >= 0.0
            && self.swirl >= 0.0
            && self.drift + 2.0 * self.swirl < 1.0
            && self.sigma_t > 0.0
            && self.sigma_x > 0.0;
        if ok {
            Ok(())
        } else {
            Err("field family bounds are inconsistent (velocities must stay below c)".into())
        }
    }

    /// Deterministic sample `index` of the stream selected by `seed`.
    pub fn sample(&self, seed: u64, index: u64) -> FieldSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let log_uniform = |rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]| (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp();
        let sym = |rng: &mut ChaCha8Rng, m: f64| m * (2.0 * rng.random::<f64>() - 1.0);
        FieldSample {
            rho0: log_uniform(&mut rng, self.rho_range),
            t0: log_uniform(&mut rng, self.temperature_range),
            amp_rho: sym(&mut rng, self.amplitude),
            amp_t: sym(&mut rng, self.amplitude),
            beta0: sym(&mut rng, self.drift),
            beta1: sym(&mut rng, self.swirl),
            beta2: sym(&mut rng, self.swirl),
            time: sym(&mut rng, 2.0 * self.sigma_t),
            x: sym(&mut rng, 2.0 * self.sigma_x),
        }
    }

    /// Field values and exact first derivatives of a sample.
    pub fn point(&self, s: &FieldSample, c: f64) -> FieldPoint {
        let bump = (-s.time * s.time / (2.0 * self.sigma_t.powi(2)) - s.x * s.x / (2.0 * self.sigma_x.powi(2))).exp();
        // ∂_0 = (1/c)∂_t, ∂_1 = ∂_x
        let d_bump = [
            -s.time / self.sigma_t.powi(2) * bump / c,
            -s.x / self.sigma_x.powi(2) * bump,
            0.0,
            0.0,
        ];
        let rho = s.rho0 * (1.0 + s.amp_rho * bump);
        let t = s.t0 * (1.0 + s.amp_t * bump);
        let vx = c * (s.beta0 + s.beta1 * bump);
        let vy = c * s.beta2 * bump;
        let lorentz = 1.0 / (1.0 - (vx * vx + vy * vy) / (c * c)).sqrt();
        let u = FourVector([lorentz * c, lorentz * vx, lorentz * vy, 0.0]);

        let mut grad_u = [[0.0; 4]; 4];
        for (a, row) in grad_u.iter_mut().enumerate() {
            let dvx = c * s.beta1 * d_bump[a];
            let dvy = c * s.beta2 * d_bump[a];
            let dl = lorentz.powi(3) * (vx * dvx + vy * dvy) / (c * c);
            *row = [c * dl, dl * vx + lorentz * dvx, dl * vy + lorentz * dvy, 0.0];
        }
        FieldPoint {
            state: ThermalState { rho, temperature: t },
            u,
            grad_rho: d_bump.map(|d| s.rho0 * s.amp_rho * d),
            grad_t: d_bump.map(|d| s.t0 * s.amp_t * d),
            grad_u,
        }
    }
}
