//! Classical (`c → ∞`) limits of the rescaled relativistic coefficients,
//! obtained by polynomial extrapolation in `1/c²` along a sequence of light
//! speeds.

use serde::Serialize;
use thiserror::Error;

use crate::closure::{
    compatibility_residual, evaluate_closure, production_coefficients, ClosureError, EquilibriumClosure,
    TransportCoefficients,
};
use crate::state_models::{evaluate, ModelError, PhysicalConstants, StateModel, ThermalState};

/// Which rescaled relativistic combination feeds each classical coefficient.
pub const RESCALINGS: [(&str, &str); 5] = [
    ("a_C", "4a - rho c^2 - 2 rho eps"),
    ("b_C", "2 c^2 (b - p)"),
    ("a1_C", "2 c^2 a1"),
    ("a2_C", "-a2"),
    ("a3_C", "c^2 a3"),
];

/// Smallest fitted order accepted as `O(1/c²)` convergence.
pub const MIN_RATE: f64 = 1.8;
/// `γ` at the largest light speed below which a warning is emitted.
pub const MIN_GAMMA_MAX: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid light-speed sequence: {0}")]
    BadSequence(String),
    #[error("classical coefficients did not converge")]
    NotConverged,
}

/// Extrapolated limit of one rescaled sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub value: f64,
    /// `|P_{0..n}(0) − P_{1..n}(0)|` of the Neville table.
    pub error_estimate: f64,
    /// Error estimates after each added point.
    pub error_history: Vec<f64>,
    /// Fitted exponent `r` of `|f(c_{i+1}) − f(c_i)| ∝ c^{−r}`; `None` when
    /// the sequence is constant to round-off.
    pub rate: Option<f64>,
    pub sequence: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalCoefficients {
    pub a_c: LimitEstimate,
    pub b_c: LimitEstimate,
    pub a1_c: LimitEstimate,
    pub a2_c: LimitEstimate,
    pub a3_c: LimitEstimate,
    /// Smallest fitted rate across the five coefficients.
    pub convergence_rate: Option<f64>,
    pub converged: bool,
    pub c_sequence: Vec<f64>,
    pub gamma_max: f64,
    pub warnings: Vec<String>,
}

impl ClassicalCoefficients {
    pub fn estimates(&self) -> [(&'static str, &LimitEstimate); 5] {
        [
            ("a_C", &self.a_c),
            ("b_C", &self.b_c),
            ("a1_C", &self.a1_c),
            ("a2_C", &self.a2_c),
            ("a3_C", &self.a3_c),
        ]
    }
}

/// `c₀·{1, 2, 4, 8, 16}` with `c₀ = √(10 k_B T/m)`, so that `γ(c₀) = 10`.
pub fn default_c_sequence(state: ThermalState, k: &PhysicalConstants) -> Vec<f64> {
    let c0 = (10.0 * k.k_b * state.temperature / k.m).sqrt();
    [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|f| f * c0).collect()
}

fn check_sequence(cs: &[f64]) -> Result<(), ClassicalError> {
    if cs.len() < 3 {
        return Err(ClassicalError::BadSequence(format!("need at least 3 values, got {}", cs.len())));
    }
    if cs.iter().any(|c| !(*c > 0.0) || !c.is_finite()) || cs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ClassicalError::BadSequence("values must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Neville extrapolation of `f(h)` to `h = 0`. Returns the extrapolant
/// through all points, its error estimate, and the estimate after each
/// added point, `|P_{0..i}(0) − P_{1..i}(0)|`.
pub fn extrapolate_to_zero(h: &[f64], f: &[f64]) -> (f64, f64, Vec<f64>) {
    let n = h.len();
    // t[i][j] = value at 0 of the polynomial through points i-j..=i
    let mut t = vec![vec![0.0; n]; n];
    for i in 0..n {
        t[i][0] = f[i];
        for j in 1..=i {
            let l = i - j;
            t[i][j] = (h[l] * t[i][j - 1] - h[i] * t[i - 1][j - 1]) / (h[l] - h[i]);
        }
    }
    let history: Vec<f64> = (1..n).map(|i| (t[i][i] - t[i][i - 1]).abs()).collect();
    let value = t[n - 1][n - 1];
    let err = history.last().copied().unwrap_or(f64::INFINITY);
    (value, err, history)
}

/// Least-squares slope of `−log|f_{i+1} − f_i|` against `log c_i`.
pub fn fitted_rate(cs: &[f64], f: &[f64]) -> Option<f64> {
    let scale = f.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let pts: Vec<(f64, f64)> = cs
        .windows(2)
        .zip(f.windows(2))
        .map(|(c, v)| ((c[0] * c[1]).sqrt().ln(), (v[1] - v[0]).abs()))
        .collect();
    if pts.iter().all(|p| p.1 <= 1e-13 * scale) {
        return None;
    }
    let pts: Vec<(f64, f64)> = pts.into_iter().map(|(x, d)| (x, d.max(f64::MIN_POSITIVE).ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

fn estimate(cs: &[f64], values: Vec<f64>, rel_tol: f64) -> LimitEstimate {
    let h: Vec<f64> = cs.iter().map(|c| 1.0 / (c * c)).collect();
    let (value, error_estimate, error_history) = extrapolate_to_zero(&h, &values);
    let rate = fitted_rate(cs, &values);
    let finite = value.is_finite() && values.iter().all(|v| v.is_finite());
    // limits may vanish (the bulk coefficient of a monatomic gas does), so the
    // error is measured against the size of the sequence itself
    let scale = values.iter().fold(value.abs(), |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let converged = finite && rate.is_none_or(|r| r >= MIN_RATE) && error_estimate <= rel_tol * scale;
    LimitEstimate {
        value,
        error_estimate,
        error_history,
        rate,
        sequence: values,
        converged,
    }
}

/// Rescaled coefficients `(a_C, b_C, a₁C, a₂C, a₃C)` at one light speed.
pub fn rescaled_coefficients(
    closure: &dyn EquilibriumClosure,
    model: &dyn StateModel,
    transport: &TransportCoefficients,
    state: ThermalState,
    k: &PhysicalConstants,
) -> Result<[f64; 5], ClosureError> {
    let ev = evaluate(model, state, k)?;
    let v = evaluate_closure(closure, state, model, k)?;
    let prod = production_coefficients(&v, &ev, transport, k)?;
    let c2 = k.c * k.c;
    let rho = state.rho;
    Ok([
        4.0 * v.a - rho * c2 - 2.0 * rho * ev.eps,
        2.0 * c2 * (v.b - ev.p),
        2.0 * c2 * prod.a1,
        -prod.a2,
        c2 * prod.a3,
    ])
}

/// Classical limits at `state` along `c_sequence`, extrapolated in `1/c²`
/// and accepted when the extrapolation error is below `rel_tol`.
pub fn classical_coefficients(
    closure: &dyn EquilibriumClosure,
    model: &dyn StateModel,
    transport: &TransportCoefficients,
    state: ThermalState,
    k: &PhysicalConstants,
    c_sequence: &[f64],
    rel_tol: f64,
) -> Result<ClassicalCoefficients, ClassicalError> {
    check_sequence(c_sequence)?;
    let mut columns: [Vec<f64>; 5] = Default::default();
    for &c in c_sequence {
        let row = rescaled_coefficients(closure, model, transport, state, &k.with_c(c))?;
        for (col, v) in columns.iter_mut().zip(row) {
            col.push(v);
        }
    }
    let [a, b, a1, a2, a3] = columns.map(|col| estimate(c_sequence, col, rel_tol));
    let gamma_max = k.with_c(*c_sequence.last().unwrap()).gamma(state.temperature);
    let mut warnings = Vec::new();
    if gamma_max < MIN_GAMMA_MAX {
        warnings.push(format!(
            "gamma at the largest c is {gamma_max:.3}, below {MIN_GAMMA_MAX}; the sequence may not be asymptotic"
        ));
    }
    let all = [&a, &b, &a1, &a2, &a3];
    let converged = all.iter().all(|e| e.converged);
    let convergence_rate = all.iter().filter_map(|e| e.rate).min_by(|x, y| x.total_cmp(y));
    Ok(ClassicalCoefficients {
        a_c: a,
        b_c: b,
        a1_c: a1,
        a2_c: a2,
        a3_c: a3,
        convergence_rate,
        converged,
        c_sequence: c_sequence.to_vec(),
        gamma_max,
        warnings,
    })
}

/// Limit of the compatibility residual divided by `ρc²` along the sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalResidual {
    pub value: f64,
    pub error_estimate: f64,
    pub sequence: Vec<f64>,
}

pub fn classical_compatibility_residual(
    coeffs: &ClassicalCoefficients,
    closure: &dyn EquilibriumClosure,
    model: &dyn StateModel,
    state: ThermalState,
    k: &PhysicalConstants,
) -> Result<ClassicalResidual, ClassicalError> {
    if !coeffs.converged {
        return Err(ClassicalError::NotConverged);
    }
    let cs = &coeffs.c_sequence;
    let mut sequence = Vec::with_capacity(cs.len());
    for &c in cs {
        let kc = k.with_c(c);
        let ev = evaluate(model, state, &kc)?;
        let v = evaluate_closure(closure, state, model, &kc)?;
        sequence.push(compatibility_residual(&v, &ev)? / (state.rho * c * c));
    }
    let h: Vec<f64> = cs.iter().map(|c| 1.0 / (c * c)).collect();
    let (value, error_estimate, _) = extrapolate_to_zero(&h, &sequence);
    Ok(ClassicalResidual {
        value,
        error_estimate,
        sequence,
    })
}
