//! The substitution `G(u) = alpha log u + D(u)`, its inverse and the KPP
//! nonlinearity `f` that drives the planar wave equation.

use crate::error::{Error, Result};
use crate::model::{DiffusionFamily, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMapContext {
    pub params: ModelParams,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl ScalarMapContext {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            newton_tol: 1e-13,
            newton_max_iter: 60,
        }
    }

    #[inline]
    fn nu(&self) -> f64 {
        let p = &self.params;
        let a = p.c / p.chi;
        a * a + a * p.c + p.gamma
    }

    pub fn g(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::NonPositive { what: "u", value: u });
        }
        Ok(self.g_unchecked(u))
    }

    #[inline]
    fn g_unchecked(&self, u: f64) -> f64 {
        self.params.alpha * u.ln() + self.params.d.primitive(u)
    }

    /// Solves `G(u) = y`. Newton runs in `s = log u`, where the map
    /// `s -> alpha s + D(e^s)` is increasing and convex, so the asymptotic seed
    /// `s = y / alpha` sits to the right of the root.
    pub fn g_inverse(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::NonFinite { what: "y", value: y });
        }
        let (u, converged) = self.solve(y);
        if converged {
            Ok(u)
        } else {
            Err(Error::NewtonNoConvergence {
                y,
                iterations: self.newton_max_iter,
            })
        }
    }

    fn solve(&self, y: f64) -> (f64, bool) {
        let alpha = self.params.alpha;
        let d = self.params.d;
        if d.family == DiffusionFamily::Zero || d.coefficient == 0.0 {
            return ((y / alpha).exp(), true);
        }
        let scale = y.abs().max(1.0);
        let tol = self.newton_tol * scale;
        let h = |s: f64| alpha * s + d.primitive(s.exp()) - y;

        let mut hi = y / alpha;
        if y > 0.0 {
            // for u >= 1 the log term is nonnegative, so D(u) = y bounds the root from above
            let u_d = match d.family {
                DiffusionFamily::Linear => y / d.coefficient,
                _ => (2.0 * y / d.coefficient).sqrt(),
            };
            if u_d >= 1.0 {
                hi = hi.min(u_d.ln());
            }
        }
        let mut width = 1.0;
        let mut lo = hi - width;
        while h(lo) > 0.0 {
            width *= 2.0;
            lo = hi - width;
        }

        let mut s = hi;
        for _ in 0..self.newton_max_iter {
            let r = h(s);
            if r.abs() <= tol {
                let polished = s - r / (alpha + d.d(s.exp()));
                let best = if h(polished).abs() < r.abs() { polished } else { s };
                return (best.exp(), true);
            }
            if r > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let slope = alpha + d.d(s.exp());
            let mut next = s - r / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 4.0 * f64::EPSILON * s.abs().max(1.0) {
                return (next.exp(), h(next).abs() <= 4.0 * tol);
            }
            s = next;
        }
        (s.exp(), h(s).abs() <= tol)
    }

    fn g_inv_or_best(&self, y: f64) -> f64 {
        self.solve(y).0
    }

    /// `(G^{-1})'(y) = G^{-1}(y) / (alpha + d(G^{-1}(y)))`.
    pub fn g_inverse_prime(&self, y: f64) -> Result<f64> {
        let u = self.g_inverse(y)?;
        Ok(u / self.params.k(u))
    }

    /// The concentration `u` that belongs to a gauge value `p`, `G^{-1}(chi log |p|)`.
    #[inline]
    pub fn u_of_p(&self, p: f64) -> f64 {
        if p == 0.0 {
            return 0.0;
        }
        self.g_inv_or_best(self.params.chi * p.abs().ln())
    }

    /// Same as [`Self::u_of_p`] but taking `log p` directly, for tails below underflow.
    #[inline]
    pub fn u_of_log_p(&self, log_p: f64) -> f64 {
        self.g_inv_or_best(self.params.chi * log_p)
    }

    pub fn f(&self, p: f64) -> f64 {
        if p == 0.0 {
            return 0.0;
        }
        p * (self.nu() - self.params.l * self.u_of_p(p))
    }

    pub fn f_prime(&self, p: f64) -> f64 {
        let nu = self.nu();
        if p == 0.0 {
            return nu;
        }
        let u = self.u_of_p(p);
        let params = &self.params;
        nu - params.l * u - params.chi * params.l * u / params.k(u)
    }

    pub fn g_remainder(&self, p: f64) -> f64 {
        if p == 0.0 {
            return 0.0;
        }
        self.params.l * p * self.u_of_p(p)
    }
}
