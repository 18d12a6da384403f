//! Smooth exponential weights and the weighted sup and C² norms.
//!
//! Both one-sided weights are written as `exp(rate * phi(±xi))`, where `phi`
//! vanishes to second order at 0, equals the identity past 1 and is a quintic
//! on `[0, 1]`. Working with `log eta` keeps the pure exponential regions
//! bit-identical to the library exponential.

use crate::error::{Error, Result};
use crate::model::Model;

/// `(phi, phi', phi'')` of the blend at `s`.
#[inline]
pub fn blend(s: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if s >= 1.0 {
        (s, 1.0, 0.0)
    } else {
        let s2 = s * s;
        let s3 = s2 * s;
        (
            s3 * (6.0 - 8.0 * s + 3.0 * s2),
            s2 * (18.0 - 32.0 * s + 15.0 * s2),
            s * (36.0 - 96.0 * s + 60.0 * s2),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub w_minus: f64,
    pub w_plus: f64,
}

impl WeightSpec {
    /// Weight with `w_minus = -c / chi` and a right rate checked against `J`.
    pub fn new(model: &Model, w_plus: f64) -> Result<Self> {
        let dq = &model.derived;
        if !(dq.j_hi > dq.j_lo) {
            return Err(Error::R1Fails);
        }
        if !dq.in_j(w_plus) {
            return Err(Error::WeightOutsideJ {
                w_plus,
                lo: dq.j_lo,
                hi: dq.j_hi,
            });
        }
        Ok(Self {
            w_minus: -dq.a,
            w_plus,
        })
    }

    /// Weight with arbitrary rates, for operator tests that do not need `J`.
    pub fn with_rates(w_minus: f64, w_plus: f64) -> Self {
        Self { w_minus, w_plus }
    }

    /// `(log eta_-, first, second derivative)`.
    #[inline]
    pub fn log_eta_minus(&self, xi: f64) -> (f64, f64, f64) {
        let r = -self.w_minus;
        let (b, b1, b2) = blend(-xi);
        (r * b, -r * b1, r * b2)
    }

    #[inline]
    pub fn log_eta_plus(&self, xi: f64) -> (f64, f64, f64) {
        let (b, b1, b2) = blend(xi);
        (self.w_plus * b, self.w_plus * b1, self.w_plus * b2)
    }

    #[inline]
    pub fn log_eta(&self, xi: f64) -> (f64, f64, f64) {
        let (m, m1, m2) = self.log_eta_minus(xi);
        let (p, p1, p2) = self.log_eta_plus(xi);
        (m + p, m1 + p1, m2 + p2)
    }

    pub fn eta_minus(&self, xi: f64) -> f64 {
        self.log_eta_minus(xi).0.exp()
    }

    pub fn eta_plus(&self, xi: f64) -> f64 {
        self.log_eta_plus(xi).0.exp()
    }

    pub fn eta(&self, xi: f64) -> f64 {
        self.log_eta(xi).0.exp()
    }

    /// `(eta, eta', eta'')` from the log derivatives.
    fn with_derivs(l: (f64, f64, f64)) -> (f64, f64, f64) {
        let e = l.0.exp();
        (e, e * l.1, e * (l.2 + l.1 * l.1))
    }

    pub fn eta_minus_derivs(&self, xi: f64) -> (f64, f64, f64) {
        Self::with_derivs(self.log_eta_minus(xi))
    }

    pub fn eta_plus_derivs(&self, xi: f64) -> (f64, f64, f64) {
        Self::with_derivs(self.log_eta_plus(xi))
    }

    pub fn eta_derivs(&self, xi: f64) -> (f64, f64, f64) {
        Self::with_derivs(self.log_eta(xi))
    }

    /// `eta_-(xi) e^{a xi}`, formed in the exponent so that it is exactly one
    /// left of `-1` whenever `w_minus = -a`.
    pub fn eta_minus_gauge(&self, xi: f64, a: f64) -> f64 {
        (self.log_eta_minus(xi).0 + a * xi).exp()
    }

    pub fn table(&self, xi: &[f64]) -> WeightTable {
        WeightTable {
            eta_plus: xi.iter().map(|&x| self.eta_plus(x)).collect(),
            eta: xi.iter().map(|&x| self.eta(x)).collect(),
        }
    }
}

/// Weights sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub eta_plus: Vec<f64>,
    pub eta: Vec<f64>,
}

fn weighted_sup(w: &[f64], f: &[f64]) -> f64 {
    w.iter().zip(f).fold(0.0f64, |m, (a, b)| m.max((a * b).abs()))
}

impl WeightTable {
    pub fn norm_x1(&self, x: &[f64]) -> f64 {
        weighted_sup(&self.eta_plus, x)
    }

    pub fn norm_x2(&self, y: &[f64]) -> f64 {
        weighted_sup(&self.eta, y)
    }

    pub fn norm_d1(&self, x: &[f64], x1: &[f64], x2: &[f64]) -> f64 {
        self.norm_x1(x) + self.norm_x1(x1) + self.norm_x1(x2)
    }

    pub fn norm_d2(&self, y: &[f64], y1: &[f64], y2: &[f64]) -> f64 {
        self.norm_x2(y) + self.norm_x2(y1) + self.norm_x2(y2)
    }

    pub fn norm_d(&self, x: [&[f64]; 3], y: [&[f64]; 3]) -> f64 {
        self.norm_d1(x[0], x[1], x[2]) + self.norm_d2(y[0], y[1], y[2])
    }

    /// `min eta v`, the positivity guard.
    pub fn min_weighted_v(&self, v: &[f64]) -> f64 {
        self.eta.iter().zip(v).fold(f64::INFINITY, |m, (a, b)| m.min(a * b))
    }
}
