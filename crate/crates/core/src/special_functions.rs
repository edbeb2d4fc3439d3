//! Modified Bessel functions of the second kind of integer order and the
//! ratio `G(γ) = K₃(γ)/K₂(γ)` used by the Jüttner gas.
//!
//! `K₀` and `K₁` come from the ascending series for `x ≤ 2` and from Steed's
//! continued fraction (Temme's CF2) above that; higher orders use upward
//! recurrence, which is stable for `Kₙ`. Everything is computed in the
//! exponentially scaled form `eˣKₙ(x)` so that ratios never underflow.

use std::f64::consts::PI;

use thiserror::Error;

/// Largest supported order.
pub const MAX_ORDER: u32 = 10;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;
const MAX_ITER: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BesselError {
    #[error("Bessel argument must be positive and finite, got {0}")]
    Domain(f64),
    #[error("Bessel order {0} is not supported (maximum {MAX_ORDER})")]
    UnsupportedOrder(u32),
}

/// A single evaluation `Kₙ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: u32,
    pub argument: f64,
    pub value: f64,
}

impl BesselEval {
    pub fn new(order: u32, argument: f64) -> Result<Self, BesselError> {
        Ok(Self {
            order,
            argument,
            value: bessel_k(order, argument)?,
        })
    }
}

fn check_argument(x: f64) -> Result<(), BesselError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(BesselError::Domain(x))
    }
}

/// `(e^x K₀(x), e^x K₁(x))` for `x ≤ 2` from the ascending series.
fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_term = (0.5 * x).ln() + EULER_GAMMA;

    // K₀ = -(ln(x/2) + γ_E) I₀(x) + Σ_{k≥1} y^k/(k!)² H_k
    // K₁ = 1/x + ln(x/2) I₁(x) - (x/4) Σ_{k≥0} (ψ(k+1) + ψ(k+2)) y^k/(k!(k+1)!)
    let mut i0 = 1.0;
    let mut k0_sum = 0.0;
    let mut term0 = 1.0; // y^k/(k!)²
    let mut harmonic = 0.0;

    let mut term1 = 1.0; // y^k/(k!(k+1)!)
    let mut i1_sum = 1.0;
    let mut psi_k1 = -EULER_GAMMA; // ψ(k+1)
    let mut psi_k2 = 1.0 - EULER_GAMMA; // ψ(k+2)
    let mut k1_sum = psi_k1 + psi_k2;

    for k in 1..MAX_ITER {
        let kf = k as f64;
        term0 *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term0;
        k0_sum += term0 * harmonic;

        term1 *= y / (kf * (kf + 1.0));
        psi_k1 += 1.0 / kf;
        psi_k2 += 1.0 / (kf + 1.0);
        i1_sum += term1;
        k1_sum += term1 * (psi_k1 + psi_k2);

        if term0 * harmonic.max(1.0) < f64::EPSILON * 1e-3 * k0_sum.abs().max(i0)
            && term1 * (psi_k1 + psi_k2).abs().max(1.0) < f64::EPSILON * 1e-3 * i1_sum
        {
            break;
        }
    }

    let k0 = -log_term * i0 + k0_sum;
    let i1 = 0.5 * x * i1_sum;
    let k1 = 1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * k1_sum;
    let scale = x.exp();
    (k0 * scale, k1 * scale)
}

/// `(e^x K₀(x), e^x K₁(x))` for `x > 2` from Steed's continued fraction.
fn k01_continued_fraction(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            break;
        }
    }
    let k0 = (PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - a1 * h) / x;
    (k0, k1)
}

fn k01_scaled(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        k01_series(x)
    } else {
        k01_continued_fraction(x)
    }
}

/// Exponentially scaled values `eˣK₀(x), …, eˣK_max(x)`.
pub fn bessel_k_scaled_sequence(max_order: u32, x: f64) -> Result<Vec<f64>, BesselError> {
    check_argument(x)?;
    if max_order > MAX_ORDER {
        return Err(BesselError::UnsupportedOrder(max_order));
    }
    let (k0, k1) = k01_scaled(x);
    let mut out = Vec::with_capacity(max_order as usize + 1);
    out.push(k0);
    if max_order >= 1 {
        out.push(k1);
    }
    for n in 1..max_order {
        let next = out[n as usize - 1] + 2.0 * f64::from(n) / x * out[n as usize];
        out.push(next);
    }
    Ok(out)
}

/// Exponentially scaled `eˣKₙ(x)`.
pub fn bessel_k_scaled(order: u32, x: f64) -> Result<f64, BesselError> {
    Ok(bessel_k_scaled_sequence(order, x)?[order as usize])
}

/// `Kₙ(x)` for integer `0 ≤ n ≤ 10` and `x > 0`.
pub fn bessel_k(order: u32, x: f64) -> Result<f64, BesselError> {
    Ok(bessel_k_scaled(order, x)? * (-x).exp())
}

/// Above this `γ` the ratio and its derivatives come from the large-argument
/// expansion; the recurrence identity for `G'` cancels to about `γ²ε` there.
pub const ASYMPTOTIC_GAMMA: f64 = 25.0;

/// `Σ aₖ(ν) z⁻ᵏ` of the Hankel expansion `Kᵥ(z) ~ √(π/2z) e⁻ᶻ Σ aₖ(ν) z⁻ᵏ`
/// with its first two `z`-derivatives.
fn hankel_sum(nu: u32, z: f64) -> (f64, f64, f64) {
    let mu = 4.0 * f64::from(nu * nu);
    let (mut s, mut ds, mut dds) = (1.0, 0.0, 0.0);
    let mut term = 1.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        let next = term * (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * z);
        if next.abs() >= term.abs() && k > 1 {
            break;
        }
        term = next;
        s += term;
        ds -= kf * term / z;
        dds += kf * (kf + 1.0) * term / (z * z);
        if term.abs() < 1e-18 * s.abs() {
            break;
        }
    }
    (s, ds, dds)
}

fn g_asymptotic(gamma: f64) -> (f64, f64, f64) {
    let (s2, d2, dd2) = hankel_sum(2, gamma);
    let (s3, d3, dd3) = hankel_sum(3, gamma);
    let g = s3 / s2;
    let num = d3 * s2 - s3 * d2;
    let gp = num / (s2 * s2);
    let gpp = (dd3 * s2 - s3 * dd2) / (s2 * s2) - 2.0 * d2 * num / (s2 * s2 * s2);
    (g, gp, gpp)
}

/// `G(γ) = K₃(γ)/K₂(γ)`.
pub fn bessel_ratio_g(gamma: f64) -> Result<f64, BesselError> {
    Ok(bessel_ratio_g_derivatives(gamma)?.0)
}

/// `dG/dγ = -1 - 5G/γ + G²`.
pub fn bessel_ratio_g_prime(gamma: f64) -> Result<f64, BesselError> {
    Ok(bessel_ratio_g_derivatives(gamma)?.1)
}

#[inline]
pub(crate) fn g_prime_from_g(g: f64, gamma: f64) -> f64 {
    -1.0 - 5.0 * g / gamma + g * g
}

/// `(G, G', G'')`. Below [`ASYMPTOTIC_GAMMA`] the derivatives follow from the
/// identity `G' = -1 - 5G/γ + G²` and its derivative.
pub fn bessel_ratio_g_derivatives(gamma: f64) -> Result<(f64, f64, f64), BesselError> {
    check_argument(gamma)?;
    if gamma >= ASYMPTOTIC_GAMMA {
        return Ok(g_asymptotic(gamma));
    }
    let k = bessel_k_scaled_sequence(3, gamma)?;
    let g = k[3] / k[2];
    let gp = g_prime_from_g(g, gamma);
    let gpp = -5.0 * gp / gamma + 5.0 * g / (gamma * gamma) + 2.0 * g * gp;
    Ok((g, gp, gpp))
}
