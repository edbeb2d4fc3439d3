//! Equilibrium main field, the potential coefficients `Γ₀`, `Γ₁`, the change
//! of variables `(λ, G₀) → (ρ, T)`, and convexity of the Euler subsystem.

use nalgebra::{Matrix5, SymmetricEigen};
use serde::Serialize;

use crate::closure::{ClosureError, ClosureValues};
use crate::covariant::FourVector;
use crate::state_models::{evaluate, gibbs_entropy, PhysicalConstants, StateEvaluation, StateModel, ThermalState};

/// `λ = −g_r/T`, `λ^β = U^β/T`, `G₀ = c²/T²`, `g_r = (e+p)/ρ − TS`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainFieldEq {
    pub lambda: f64,
    pub lambda_vec: FourVector,
    pub g0: f64,
    pub g_r: f64,
}

pub fn equilibrium_main_field(
    state: ThermalState,
    u: &FourVector,
    model: &dyn StateModel,
    k: &PhysicalConstants,
) -> Result<MainFieldEq, ClosureError> {
    u.check_normalized(k.c)?;
    let ev = evaluate(model, state, k)?;
    let s = gibbs_entropy(model, state, k)?;
    let t = state.temperature;
    let g_r = (ev.e + ev.p) / state.rho - t * s.s;
    Ok(MainFieldEq {
        lambda: -g_r / t,
        lambda_vec: u.scale(1.0 / t),
        g0: k.c * k.c / (t * t),
        g_r,
    })
}

/// `(∂f/∂λ, ∂f/∂G₀)` from `(f_ρ, f_T)`:
/// `∂f/∂λ = −f_ρTρ/p_ρ`,
/// `∂f/∂G₀ = −(T²/(2c²p_ρ))[f_ρ(e+p−Tp_T) + f_T p_ρ T]`.
pub fn chain_rule_derivatives(
    f_rho: f64,
    f_t: f64,
    ev: &StateEvaluation,
    k: &PhysicalConstants,
) -> Result<(f64, f64), ClosureError> {
    if ev.p_rho == 0.0 || !ev.p_rho.is_finite() {
        return Err(ClosureError::SingularPressureDerivative {
            rho: ev.state.rho,
            temperature: ev.state.temperature,
        });
    }
    let (rho, t) = (ev.state.rho, ev.state.temperature);
    let d_lambda = -f_rho * t * rho / ev.p_rho;
    let d_g0 = -(t * t) / (2.0 * k.c * k.c * ev.p_rho) * (f_rho * ev.enthalpy_defect() + f_t * ev.p_rho * t);
    Ok((d_lambda, d_g0))
}

/// `Γ₀ = −p`, `Γ₁ = −2Tb` and the derivatives of `Γ₁` in the main-field
/// variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialCoefficients {
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma1_rho: f64,
    pub gamma1_t: f64,
    pub dgamma1_dlambda: f64,
    pub dgamma1_dg0: f64,
}

pub fn potential_coefficients(
    v: &ClosureValues,
    ev: &StateEvaluation,
    k: &PhysicalConstants,
) -> Result<PotentialCoefficients, ClosureError> {
    let t = ev.state.temperature;
    let gamma1_rho = -2.0 * t * v.b_rho;
    let gamma1_t = -2.0 * v.b - 2.0 * t * v.b_t;
    let (dgamma1_dlambda, dgamma1_dg0) = chain_rule_derivatives(gamma1_rho, gamma1_t, ev, k)?;
    Ok(PotentialCoefficients {
        gamma0: -ev.p,
        gamma1: -2.0 * t * v.b,
        gamma1_rho,
        gamma1_t,
        dgamma1_dlambda,
        dgamma1_dg0,
    })
}

/// `a = ¼{Γ₁/T − (1/(2Tp_ρ))(Γ₁_ρ(e+p−Tp_T) + Γ₁_T p_ρ T)}` with `Γ₁ = −2Tb`.
pub fn a_from_gamma1(b: f64, b_rho: f64, b_t: f64, ev: &StateEvaluation) -> Result<f64, ClosureError> {
    if ev.p_rho == 0.0 || !ev.p_rho.is_finite() {
        return Err(ClosureError::SingularPressureDerivative {
            rho: ev.state.rho,
            temperature: ev.state.temperature,
        });
    }
    let t = ev.state.temperature;
    let gamma1 = -2.0 * t * b;
    let gamma1_rho = -2.0 * t * b_rho;
    let gamma1_t = -2.0 * b - 2.0 * t * b_t;
    Ok(0.25 * (gamma1 / t - (gamma1_rho * ev.enthalpy_defect() + gamma1_t * ev.p_rho * t) / (2.0 * t * ev.p_rho)))
}

/// `a = ¼(Γ₁/T + (c²/T³)∂Γ₁/∂G₀)`, going through the main-field derivative.
pub fn a_from_potential(pc: &PotentialCoefficients, ev: &StateEvaluation, k: &PhysicalConstants) -> f64 {
    let t = ev.state.temperature;
    0.25 * (pc.gamma1 / t + k.c * k.c / (t * t * t) * pc.dgamma1_dg0)
}

/// Sign pattern of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerConvexity {
    pub negative_definite: bool,
    pub signature: Signature,
    /// Ascending, of the form in the scaled variables
    /// `(δρ/ρ, δT/T, δU¹/c, δU²/c, δU³/c)`.
    pub eigenvalues: Vec<f64>,
    /// Largest entry of the antisymmetric part of `J_λᵀJ_u`; zero for a
    /// Gibbs-integrable model.
    pub asymmetry: f64,
    /// `[[f64; 5]; 5]` in `(δρ, δT, δU¹, δU², δU³)`.
    pub hessian: [[f64; 5]; 5],
}

impl EulerConvexity {
    /// `Q(δ) = δᵀ M δ`.
    pub fn quadratic_form(&self, delta: &[f64; 5]) -> f64 {
        let mut q = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                q += delta[i] * self.hessian[i][j] * delta[j];
            }
        }
        q
    }
}

/// Rest-frame form `δλ_A δu^A` over the Euler variables, with
/// `u^A = (ρU⁰, T^{00}, T^{0i})` and `λ_A = (λ, λ_0, λ_i)`.
pub fn euler_convexity(ev: &StateEvaluation, k: &PhysicalConstants) -> EulerConvexity {
    let (rho, t) = (ev.state.rho, ev.state.temperature);
    let c = k.c;
    let enthalpy = ev.e + ev.p;
    // rows: δ(ρU⁰), δT^{00}, δT^{0i}; columns: δρ, δT, δU^i
    let mut j_u = Matrix5::<f64>::zeros();
    j_u[(0, 0)] = c;
    j_u[(1, 0)] = ev.e_rho;
    j_u[(1, 1)] = ev.e_t;
    for i in 2..5 {
        j_u[(i, i)] = enthalpy / c;
    }
    // rows: δλ, δλ_0, δλ_i (covariant)
    let mut j_l = Matrix5::<f64>::zeros();
    j_l[(0, 0)] = -ev.p_rho / (rho * t);
    j_l[(0, 1)] = ev.enthalpy_defect() / (rho * t * t);
    j_l[(1, 1)] = -c / (t * t);
    for i in 2..5 {
        j_l[(i, i)] = -1.0 / t;
    }
    let raw = j_l.transpose() * j_u;
    let sym = (raw + raw.transpose()) * 0.5;
    let asymmetry = ((raw - raw.transpose()) * 0.5).amax();

    // congruence with diag(ρ, T, c, c, c) keeps the signature and makes the
    // entries commensurate
    let d = Matrix5::from_diagonal(&nalgebra::Vector5::new(rho, t, c, c, c));
    let eig = SymmetricEigen::new(d * sym * d);
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.total_cmp(b));
    let threshold = 1e-12 * eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let signature = Signature {
        negative: eigenvalues.iter().filter(|&&x| x < -threshold).count(),
        zero: eigenvalues.iter().filter(|&&x| x.abs() <= threshold).count(),
        positive: eigenvalues.iter().filter(|&&x| x > threshold).count(),
    };
    let mut hessian = [[0.0; 5]; 5];
    for (i, row) in hessian.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = sym[(i, j)];
        }
    }
    EulerConvexity {
        negative_definite: signature.negative == 5,
        signature,
        eigenvalues,
        asymmetry,
        hessian,
    }
}
