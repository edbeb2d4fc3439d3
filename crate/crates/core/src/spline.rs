//! Natural cubic splines on strictly increasing knots.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("a spline needs at least 3 knots, got {0}")]
    TooFewKnots(usize),
    #[error("spline knots must be finite and strictly increasing (knot {0})")]
    NotIncreasing(usize),
    #[error("spline value at knot {0} is not finite")]
    NonFinite(usize),
    #[error("{x} is outside the spline range [{min}, {max}]")]
    OutOfRange { x: f64, min: f64, max: f64 },
}

/// Piecewise cubic with continuous second derivative and zero curvature at
/// both ends. Stores the knot values and second derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    /// Running integral at each knot, measured from the first knot.
    cumulative: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, SplineError> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(SplineError::TooFewKnots(n.min(y.len())));
        }
        for i in 0..n {
            if !x[i].is_finite() || (i > 0 && x[i] <= x[i - 1]) {
                return Err(SplineError::NotIncreasing(i));
            }
            if !y[i].is_finite() {
                return Err(SplineError::NonFinite(i));
            }
        }

        // Tridiagonal system for interior second derivatives (Thomas algorithm).
        let mut m = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            diag[i] = 2.0 * (h0 + h1);
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
        }
        for i in 2..n - 1 {
            let h = x[i] - x[i - 1];
            let w = h / diag[i - 1];
            diag[i] -= w * h;
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            let upper = if i + 1 < n - 1 {
                (x[i + 1] - x[i]) * m[i + 1]
            } else {
                0.0
            };
            m[i] = (rhs[i] - upper) / diag[i];
        }

        let mut spline = Self {
            x,
            y,
            m,
            cumulative: vec![0.0; n],
        };
        for i in 1..n {
            spline.cumulative[i] = spline.cumulative[i - 1] + spline.segment_integral(i - 1, 1.0);
        }
        Ok(spline)
    }

    /// Builds from `[x, y]` pairs.
    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self, SplineError> {
        Self::new(
            pairs.iter().map(|p| p[0]).collect(),
            pairs.iter().map(|p| p[1]).collect(),
        )
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    fn locate(&self, t: f64) -> Result<usize, SplineError> {
        let (min, max) = self.domain();
        if !(t >= min && t <= max) {
            return Err(SplineError::OutOfRange { x: t, min, max });
        }
        let idx = self.x.partition_point(|&k| k <= t);
        Ok(idx.clamp(1, self.x.len() - 1) - 1)
    }

    /// Integral over `[x_i, x_i + s·h_i]`.
    fn segment_integral(&self, i: usize, s: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        // f(s) = (1-s) y0 + s y1 + h²/6 [((1-s)³-(1-s)) m0 + (s³-s) m1]
        let lin = y0 * (s - 0.5 * s * s) + y1 * 0.5 * s * s;
        let u = 1.0 - s;
        let cub0 = -(u.powi(4) / 4.0 - u * u / 2.0) + (1.0 / 4.0 - 1.0 / 2.0);
        let cub1 = s.powi(4) / 4.0 - s * s / 2.0;
        h * (lin + h * h / 6.0 * (m0 * cub0 + m1 * cub1))
    }

    /// Value, first and second derivative at `t`.
    pub fn eval_with_derivatives(&self, t: f64) -> Result<(f64, f64, f64), SplineError> {
        let i = self.locate(t)?;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let u = 1.0 - s;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let value = u * y0 + s * y1 + h * h / 6.0 * ((u * u * u - u) * m0 + (s * s * s - s) * m1);
        let slope = (y1 - y0) / h + h / 6.0 * (-(3.0 * u * u - 1.0) * m0 + (3.0 * s * s - 1.0) * m1);
        let curvature = u * m0 + s * m1;
        Ok((value, slope, curvature))
    }

    pub fn eval(&self, t: f64) -> Result<f64, SplineError> {
        Ok(self.eval_with_derivatives(t)?.0)
    }

    /// `∫_{x₀}^{t}` of the spline, exact.
    pub fn integral_from_start(&self, t: f64) -> Result<f64, SplineError> {
        let i = self.locate(t)?;
        let h = self.x[i + 1] - self.x[i];
        Ok(self.cumulative[i] + self.segment_integral(i, (t - self.x[i]) / h))
    }
}

impl TryFrom<Vec<[f64; 2]>> for CubicSpline {
    type Error = SplineError;
    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        Self::from_pairs(&pairs)
    }
}

impl From<CubicSpline> for Vec<[f64; 2]> {
    fn from(s: CubicSpline) -> Self {
        s.x.iter().zip(&s.y).map(|(&x, &y)| [x, y]).collect()
    }
}
