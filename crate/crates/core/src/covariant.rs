//! Flat-spacetime tensor algebra with signature `(+,−,−,−)`, index 0 = time.
//!
//! Conventions: a [`FourVector`] holds contravariant components `V^α`; a
//! [`Covector`] holds covariant components such as gradients `∂_α f`;
//! [`SymTensor2`] holds contravariant `M^{αβ}`; [`Tensor3`] holds
//! `A^{αβγ}` symmetric in `(β, γ)` only, packed as 4×10.

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;
use thiserror::Error;

use crate::closure::ProductionCoefficients;
use crate::state_models::StateEvaluation;

pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Relative tolerance of the normalisation `U·U = c²`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Relative tolerance of the orthogonality and trace constraints on
/// non-equilibrium fields.
pub const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CovariantError {
    #[error("four-velocity is not normalised: U·U = {norm}, expected c² = {expected}")]
    Unnormalized { norm: f64, expected: f64 },
    #[error("non-equilibrium fields violate {constraint} (value {value:.3e})")]
    Constraint { constraint: &'static str, value: f64 },
}

/// Covariant components `X_α`.
pub type Covector = [f64; 4];

/// `∂_α U^β` stored as `[α][β]`.
pub type VelocityGradient = [[f64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: Self = Self([0.0; 4]);

    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self([t, x, y, z])
    }

    /// `U = (c, 0, 0, 0)`.
    pub fn rest(c: f64) -> Self {
        Self([c, 0.0, 0.0, 0.0])
    }

    /// Four-velocity of a particle moving with 3-velocity `v`.
    pub fn from_three_velocity(v: [f64; 3], c: f64) -> Self {
        let v2 = v.iter().map(|x| x * x).sum::<f64>();
        let lorentz = 1.0 / (1.0 - v2 / (c * c)).sqrt();
        Self([lorentz * c, lorentz * v[0], lorentz * v[1], lorentz * v[2]])
    }

    pub fn lower(&self) -> Covector {
        lower(&self.0)
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        (0..4).map(|i| METRIC[i] * self.0[i] * other.0[i]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    /// Checks `U·U = c²`.
    pub fn check_normalized(&self, c: f64) -> Result<(), CovariantError> {
        let norm = self.dot(self);
        let scale = self.0.iter().map(|x| x * x).sum::<f64>().max(c * c);
        if (norm - c * c).abs() <= NORMALIZATION_TOL * scale {
            Ok(())
        } else {
            Err(CovariantError::Unnormalized { norm, expected: c * c })
        }
    }
}

/// `X_α = g_{αβ} X^β` (also raises, the metric being its own inverse).
pub fn lower(v: &[f64; 4]) -> [f64; 4] {
    [v[0], -v[1], -v[2], -v[3]]
}

pub fn raise(v: &Covector) -> [f64; 4] {
    lower(v)
}

/// `X_α Y^α`.
pub fn contract(co: &Covector, contra: &[f64; 4]) -> f64 {
    (0..4).map(|i| co[i] * contra[i]).sum()
}

pub(crate) const fn packed_index(i: usize, j: usize) -> usize {
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    // row-major upper triangle: (0,0..3)=0..3, (1,1..3)=4..6, (2,2..3)=7..8, (3,3)=9
    lo * 4 - lo * (lo + 1) / 2 + hi
}

/// Symmetric rank-2 tensor `M^{αβ}`, 10 packed components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymTensor2 {
    packed: [f64; 10],
}

impl Default for SymTensor2 {
    fn default() -> Self {
        Self::ZERO
    }
}

impl SymTensor2 {
    pub const ZERO: Self = Self { packed: [0.0; 10] };

    /// Builds from `f(i, j)`, reading only `i ≤ j`.
    pub fn from_fn(f: impl Fn(usize, usize) -> f64) -> Self {
        let mut packed = [0.0; 10];
        for i in 0..4 {
            for j in i..4 {
                packed[packed_index(i, j)] = f(i, j);
            }
        }
        Self { packed }
    }

    /// Symmetric part of an arbitrary 4×4 array.
    pub fn symmetrize(m: &[[f64; 4]; 4]) -> Self {
        Self::from_fn(|i, j| 0.5 * (m[i][j] + m[j][i]))
    }

    pub fn metric() -> Self {
        Self::from_fn(|i, j| if i == j { METRIC[i] } else { 0.0 })
    }

    pub fn outer(u: &[f64; 4], v: &[f64; 4]) -> Self {
        Self::from_fn(|i, j| 0.5 * (u[i] * v[j] + u[j] * v[i]))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[packed_index(i, j)]
    }

    pub fn packed(&self) -> &[f64; 10] {
        &self.packed
    }

    pub fn to_array(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i, j);
            }
        }
        m
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            packed: self.packed.map(|x| x * s),
        }
    }

    /// Same components with both indices lowered.
    pub fn lower_both(&self) -> Self {
        Self::from_fn(|i, j| METRIC[i] * METRIC[j] * self.get(i, j))
    }

    /// `g_{αβ} M^{αβ}`.
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| METRIC[i] * self.get(i, i)).sum()
    }

    /// `M^{αβ} X_α Y_β` for covectors.
    pub fn contract_covectors(&self, x: &Covector, y: &Covector) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += self.get(i, j) * x[i] * y[j];
            }
        }
        s
    }

    /// `M^{αβ} X_β`.
    pub fn contract_right(&self, x: &Covector) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| self.get(i, j) * x[j]).sum();
        }
        out
    }

    /// `M^{αβ} N_{αβ}` where `other` stores covariant components.
    pub fn double_contract_lower(&self, other_lower: &SymTensor2) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += self.get(i, j) * other_lower.get(i, j);
            }
        }
        s
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Frobenius norm over all 16 components.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += self.get(i, j).powi(2);
            }
        }
        s.sqrt()
    }
}

impl Add for SymTensor2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut packed = self.packed;
        for (p, q) in packed.iter_mut().zip(o.packed) {
            *p += q;
        }
        Self { packed }
    }
}

impl Sub for SymTensor2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-1.0)
    }
}

/// `h^{αβ} = U^αU^β/c² − g^{αβ}`.
pub fn projector(u: &FourVector, c: f64) -> Result<SymTensor2, CovariantError> {
    u.check_normalized(c)?;
    Ok(projector_unchecked(u, c))
}

fn projector_unchecked(u: &FourVector, c: f64) -> SymTensor2 {
    let c2 = c * c;
    SymTensor2::from_fn(|i, j| u.0[i] * u.0[j] / c2 - if i == j { METRIC[i] } else { 0.0 })
}

/// Mixed projector `h^α_β` as `[α][β]`.
pub fn projector_mixed(h: &SymTensor2) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for (a, row) in m.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = h.get(a, b) * METRIC[b];
        }
    }
    m
}

/// Four-dimensional traceless part `M^{⟨αβ⟩}`.
pub fn traceless(m: &SymTensor2) -> SymTensor2 {
    let tr = m.trace();
    SymTensor2::from_fn(|i, j| m.get(i, j) - 0.25 * tr * if i == j { METRIC[i] } else { 0.0 })
}

/// Traceless part of the projection orthogonal to `U`, `M^{⟨αβ⟩₃}`.
pub fn deviatoric3(m: &SymTensor2, h: &SymTensor2) -> SymTensor2 {
    let hm = projector_mixed(h);
    let h_lower = h.lower_both();
    let mut proj = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut s = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    s += hm[a][mu] * hm[b][nu] * m.get(mu, nu);
                }
            }
            proj[a][b] = s;
        }
    }
    let spatial_trace = m.double_contract_lower(&h_lower);
    SymTensor2::from_fn(|a, b| proj[a][b] - h.get(a, b) * spatial_trace / 3.0)
}

/// `A^{αβγ}`, symmetric in the last pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tensor3 {
    data: [[f64; 10]; 4],
}

impl Tensor3 {
    pub const ZERO: Self = Self { data: [[0.0; 10]; 4] };

    pub fn from_fn(f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut data = [[0.0; 10]; 4];
        for (a, slab) in data.iter_mut().enumerate() {
            for b in 0..4 {
                for c in b..4 {
                    slab[packed_index(b, c)] = f(a, b, c);
                }
            }
        }
        Self { data }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[a][packed_index(b, c)]
    }

    /// `A^{α·}` as a symmetric tensor in the last pair.
    pub fn slice(&self, a: usize) -> SymTensor2 {
        SymTensor2 { packed: self.data[a] }
    }

    /// `g_{βγ} A^{αβγ}`.
    pub fn trace_last_pair(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (a, o) in out.iter_mut().enumerate() {
            *o = self.slice(a).trace();
        }
        out
    }

    /// Traceless part in the last pair, `A^{α⟨βγ⟩}`.
    pub fn traceless_last_pair(&self) -> Self {
        let mut out = *self;
        for a in 0..4 {
            out.data[a] = traceless(&self.slice(a)).packed;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..4 {
            for k in 0..10 {
                m = m.max((self.data[a][k] - other.data[a][k]).abs());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Tensor3::ZERO)
    }
}

// ---------------------------------------------------------------------------
// Lorentz boosts along x

/// Boost matrix `Λ^α_β` for velocity `v` along x.
pub fn boost_x(v: f64, c: f64) -> [[f64; 4]; 4] {
    let beta = v / c;
    let g = 1.0 / (1.0 - beta * beta).sqrt();
    [
        [g, g * beta, 0.0, 0.0],
        [g * beta, g, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn boost_vector(l: &[[f64; 4]; 4], v: &FourVector) -> FourVector {
    let mut out = [0.0; 4];
    for (a, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|b| l[a][b] * v.0[b]).sum();
    }
    FourVector(out)
}

pub fn boost_tensor2(l: &[[f64; 4]; 4], m: &SymTensor2) -> SymTensor2 {
    SymTensor2::from_fn(|a, b| {
        let mut s = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                s += l[a][mu] * l[b][nu] * m.get(mu, nu);
            }
        }
        s
    })
}

pub fn boost_tensor3(l: &[[f64; 4]; 4], t: &Tensor3) -> Tensor3 {
    Tensor3::from_fn(|a, b, c| {
        let mut s = 0.0;
        for x in 0..4 {
            for y in 0..4 {
                for z in 0..4 {
                    s += l[a][x] * l[b][y] * l[c][z] * t.get(x, y, z);
                }
            }
        }
        s
    })
}

// ---------------------------------------------------------------------------
// Equilibrium and production tensors

/// Scalars that can flow through the tensor assembly: plain `f64` or a dual
/// number carrying one directional derivative.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn constant(v: f64) -> Self;
}

impl Scalar for f64 {
    fn constant(v: f64) -> Self {
        v
    }
}

/// `value + ε·derivative` with `ε² = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub derivative: f64,
}

impl Dual {
    pub fn new(value: f64, derivative: f64) -> Self {
        Self { value, derivative }
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.derivative + o.derivative)
    }
}

impl Sub for Dual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.derivative - o.derivative)
    }
}

impl Mul for Dual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.value * o.value, self.value * o.derivative + self.derivative * o.value)
    }
}

impl Neg for Dual {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.derivative)
    }
}

impl Scalar for Dual {
    fn constant(v: f64) -> Self {
        Self::new(v, 0.0)
    }
}

/// `A^{α⟨βγ⟩} = a U^α(h^{βγ} + 3U^βU^γ/c²) + b(h^{αγ}U^β + h^{αβ}U^γ)` for
/// all `β ≤ γ`, as `[α][packed(β,γ)]`.
pub fn equilibrium_triple_generic<S: Scalar>(a: S, b: S, u: &[S; 4], c: f64) -> [[S; 10]; 4] {
    let inv_c2 = S::constant(1.0 / (c * c));
    let three = S::constant(3.0);
    let h = |i: usize, j: usize| -> S {
        let g = if i == j { S::constant(METRIC[i]) } else { S::constant(0.0) };
        u[i] * u[j] * inv_c2 - g
    };
    let mut out = [[S::constant(0.0); 10]; 4];
    for (al, slab) in out.iter_mut().enumerate() {
        for be in 0..4 {
            for ga in be..4 {
                slab[packed_index(be, ga)] = a * u[al] * (h(be, ga) + three * u[be] * u[ga] * inv_c2)
                    + b * (h(al, ga) * u[be] + h(al, be) * u[ga]);
            }
        }
    }
    out
}

/// Equilibrium fluxes at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumTensors {
    pub particle_flux: FourVector,
    pub energy_momentum: SymTensor2,
    pub triple: Tensor3,
}

/// `V^α = ρU^α`, `T^{αβ}_E = p h^{αβ} + e U^αU^β/c²`, and `A_E^{α⟨βγ⟩}`.
pub fn assemble_equilibrium_tensors(
    ev: &StateEvaluation,
    a: f64,
    b: f64,
    u: &FourVector,
    c: f64,
) -> Result<EquilibriumTensors, CovariantError> {
    let h = projector(u, c)?;
    let c2 = c * c;
    let energy_momentum = SymTensor2::from_fn(|i, j| ev.p * h.get(i, j) + ev.e * u.0[i] * u.0[j] / c2);
    let raw = equilibrium_triple_generic(a, b, &u.0, c);
    Ok(EquilibriumTensors {
        particle_flux: u.scale(ev.state.rho),
        energy_momentum,
        triple: Tensor3 { data: raw },
    })
}

/// Heat flux `q^α`, shear stress `t^{⟨αβ⟩₃}` and dynamical pressure `π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoneqFields {
    pub q: FourVector,
    pub t: SymTensor2,
    pub pi: f64,
}

impl NoneqFields {
    pub const ZERO: Self = Self {
        q: FourVector::ZERO,
        t: SymTensor2::ZERO,
        pi: 0.0,
    };

    /// `q·U = 0`, `t U = 0`, `g_{αβ}t^{αβ} = 0`.
    pub fn validate(&self, u: &FourVector, c: f64) -> Result<(), CovariantError> {
        let ul = u.lower();
        let qscale = self.q.0.iter().fold(0.0f64, |m, x| m.max(x.abs())) * c;
        let qu = contract(&ul, &self.q.0);
        if qu.abs() > CONSTRAINT_TOL * qscale.max(f64::MIN_POSITIVE) {
            return Err(CovariantError::Constraint {
                constraint: "q·U = 0",
                value: qu,
            });
        }
        let tscale = self.t.max_abs() * u.0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tu = self.t.contract_right(&ul);
        let tu_max = tu.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if tu_max > CONSTRAINT_TOL * tscale.max(f64::MIN_POSITIVE) {
            return Err(CovariantError::Constraint {
                constraint: "t·U = 0",
                value: tu_max,
            });
        }
        let tr = self.t.trace();
        if tr.abs() > CONSTRAINT_TOL * self.t.max_abs().max(f64::MIN_POSITIVE) {
            return Err(CovariantError::Constraint {
                constraint: "trace t = 0",
                value: tr,
            });
        }
        Ok(())
    }
}

/// `I^{⟨βγ⟩} = a₁(U^βq^γ + U^γq^β) + a₂t^{βγ} + a₃π(U^βU^γ − c²g^{βγ}/4)`.
pub fn assemble_production(
    prod: &ProductionCoefficients,
    fields: &NoneqFields,
    u: &FourVector,
    c: f64,
) -> Result<SymTensor2, CovariantError> {
    u.check_normalized(c)?;
    fields.validate(u, c)?;
    Ok(production_unchecked(prod, fields, u, c))
}

pub(crate) fn production_unchecked(
    prod: &ProductionCoefficients,
    fields: &NoneqFields,
    u: &FourVector,
    c: f64,
) -> SymTensor2 {
    let (uu, q) = (&u.0, &fields.q.0);
    let c2 = c * c;
    SymTensor2::from_fn(|b, g| {
        let metric = if b == g { METRIC[b] } else { 0.0 };
        prod.a1 * (uu[b] * q[g] + uu[g] * q[b])
            + prod.a2 * fields.t.get(b, g)
            + prod.a3 * fields.pi * (uu[b] * uu[g] - 0.25 * c2 * metric)
    })
}

/// Entropy production
/// `σ = −(q^α/T²)(∂_αT − T U̇_α/c²) + (t^{αβ}∂_αU_β − π∂_αU^α)/T`,
/// with `U̇^β = U^α∂_αU^β` taken from the velocity gradient.
pub fn entropy_production(
    temperature: f64,
    fields: &NoneqFields,
    grad_t: &Covector,
    grad_u: &VelocityGradient,
    u: &FourVector,
    c: f64,
) -> f64 {
    let mut u_dot = [0.0; 4];
    for (b, ud) in u_dot.iter_mut().enumerate() {
        *ud = (0..4).map(|a| u.0[a] * grad_u[a][b]).sum();
    }
    let u_dot_lower = lower(&u_dot);
    let c2 = c * c;
    let mut heat = 0.0;
    for a in 0..4 {
        heat += fields.q.0[a] * (grad_t[a] - temperature / c2 * u_dot_lower[a]);
    }
    let mut shear = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            // ∂_α U_β = g_{ββ} ∂_α U^β
            shear += fields.t.get(a, b) * METRIC[b] * grad_u[a][b];
        }
    }
    let expansion: f64 = (0..4).map(|a| grad_u[a][a]).sum();
    -heat / (temperature * temperature) + (shear - fields.pi * expansion) / temperature
}
