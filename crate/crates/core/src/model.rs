//! Model coefficients, admissibility checks and the closed-form constants
//! that every other module builds on.
//!
//! The species diffusion is `k(u) = alpha + d(u)` with `d` drawn from three
//! closed-form families, the chemical diffusion is normalised to one and the
//! chemotactic sensitivity is `chi / v`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar_maps::ScalarMapContext;

/// Slack applied at the closed upper endpoint of `J_u`.
pub const JU_UPPER_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffusionFamily {
    Zero,
    Linear,
    Quadratic,
}

/// Nonlinear part `d` of the species diffusion coefficient.
///
/// `Zero`: `d = 0`; `Linear`: `d = beta u`; `Quadratic`: `d = beta u^2`.
/// The primitive `D(u) = int_0^u d(t)/t dt` is `0`, `beta u` and `beta u^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionPerturbation {
    pub family: DiffusionFamily,
    #[serde(default)]
    pub coefficient: f64,
}

impl DiffusionPerturbation {
    pub const ZERO: Self = Self {
        family: DiffusionFamily::Zero,
        coefficient: 0.0,
    };

    pub fn linear(beta: f64) -> Self {
        Self {
            family: DiffusionFamily::Linear,
            coefficient: beta,
        }
    }

    pub fn quadratic(beta: f64) -> Self {
        Self {
            family: DiffusionFamily::Quadratic,
            coefficient: beta,
        }
    }

    #[inline]
    pub fn d(&self, u: f64) -> f64 {
        match self.family {
            DiffusionFamily::Zero => 0.0,
            DiffusionFamily::Linear => self.coefficient * u,
            DiffusionFamily::Quadratic => self.coefficient * u * u,
        }
    }

    #[inline]
    pub fn d_prime(&self, u: f64) -> f64 {
        match self.family {
            DiffusionFamily::Zero => 0.0,
            DiffusionFamily::Linear => self.coefficient,
            DiffusionFamily::Quadratic => 2.0 * self.coefficient * u,
        }
    }

    #[inline]
    pub fn d_second(&self, _u: f64) -> f64 {
        match self.family {
            DiffusionFamily::Zero | DiffusionFamily::Linear => 0.0,
            DiffusionFamily::Quadratic => 2.0 * self.coefficient,
        }
    }

    /// `D(u) = int_0^u d(t)/t dt`.
    #[inline]
    pub fn primitive(&self, u: f64) -> f64 {
        match self.family {
            DiffusionFamily::Zero => 0.0,
            DiffusionFamily::Linear => self.coefficient * u,
            DiffusionFamily::Quadratic => 0.5 * self.coefficient * u * u,
        }
    }

    /// `d(u0 + x) - d(u0)` without cancellation.
    #[inline]
    pub fn d_increment(&self, u0: f64, x: f64) -> f64 {
        match self.family {
            DiffusionFamily::Zero => 0.0,
            DiffusionFamily::Linear => self.coefficient * x,
            DiffusionFamily::Quadratic => self.coefficient * x * (2.0 * u0 + x),
        }
    }

    /// `d'(u0 + x) - d'(u0)` without cancellation.
    #[inline]
    pub fn d_prime_increment(&self, _u0: f64, x: f64) -> f64 {
        match self.family {
            DiffusionFamily::Zero | DiffusionFamily::Linear => 0.0,
            DiffusionFamily::Quadratic => 2.0 * self.coefficient * x,
        }
    }
}

impl Default for DiffusionPerturbation {
    fn default() -> Self {
        Self::ZERO
    }
}

/// Coefficients of the moving-frame system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub alpha: f64,
    pub chi: f64,
    pub gamma: f64,
    pub l: f64,
    pub c: f64,
    #[serde(default)]
    pub d: DiffusionPerturbation,
}

impl ModelParams {
    /// The reference set `alpha = chi = gamma = l = 1`, `c = 3`, `d = 0`.
    pub fn reference() -> Self {
        Self {
            alpha: 1.0,
            chi: 1.0,
            gamma: 1.0,
            l: 1.0,
            c: 3.0,
            d: DiffusionPerturbation::ZERO,
        }
    }

    #[inline]
    pub fn k(&self, u: f64) -> f64 {
        self.alpha + self.d.d(u)
    }
}

/// A single failed admissibility constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NotPositive { name: &'static str, value: f64 },
    NotFinite { name: &'static str },
    NegativeDiffusionCoefficient { value: f64 },
    SpeedCondition { c: f64, gamma: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotPositive { name, value } => write!(f, "{name} > 0 fails ({name} = {value})"),
            Violation::NotFinite { name } => write!(f, "{name} is not finite"),
            Violation::NegativeDiffusionCoefficient { value } => {
                write!(f, "diffusion coefficient >= 0 fails (beta = {value})")
            }
            Violation::SpeedCondition { c, gamma } => write!(
                f,
                "existence condition c > 2·sqrt(gamma) fails (c² > 4γ fails: c = {c}, gamma = {gamma})"
            ),
        }
    }
}

/// Checks positivity, finiteness and `c^2 > 4 gamma`. Reports every violation.
pub fn validate(params: &ModelParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let fields = [
        ("alpha", params.alpha),
        ("chi", params.chi),
        ("gamma", params.gamma),
        ("l", params.l),
        ("c", params.c),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            out.push(Violation::NotFinite { name });
        } else if value <= 0.0 {
            out.push(Violation::NotPositive { name, value });
        }
    }
    let beta = params.d.coefficient;
    if !beta.is_finite() {
        out.push(Violation::NotFinite { name: "d.coefficient" });
    } else if beta < 0.0 {
        out.push(Violation::NegativeDiffusionCoefficient { value: beta });
    }
    if params.c.is_finite() && params.gamma.is_finite() && !(params.c * params.c > 4.0 * params.gamma) {
        out.push(Violation::SpeedCondition {
            c: params.c,
            gamma: params.gamma,
        });
    }
    out
}

/// Closed-form constants of the wave problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    /// `c / chi`, the gauge rate in `v = e^{a xi} p`.
    pub a: f64,
    pub mu: f64,
    pub nu: f64,
    pub kappa_plus: f64,
    pub kappa_minus: f64,
    pub p0: f64,
    pub u_minus: f64,
    /// `f'(p0) = -chi nu / (alpha + d(nu / l))`.
    pub f_prime_p0: f64,
    pub lambda_unstable: f64,
    pub j_lo: f64,
    pub j_hi: f64,
    /// Open lower endpoint of `J_u`, the larger root of `t^2 - c t + gamma`.
    pub ju_lo: f64,
}

impl DerivedQuantities {
    /// `J_u` as `(open lower, closed upper)`; empty when `lower >= upper`.
    pub fn ju(&self) -> (f64, f64) {
        (self.ju_lo, self.j_hi)
    }

    pub fn ju_nonempty(&self) -> bool {
        self.ju_lo < self.j_hi
    }

    pub fn in_j(&self, w_plus: f64) -> bool {
        w_plus >= self.j_lo - JU_UPPER_SLACK && w_plus <= self.j_hi + JU_UPPER_SLACK
    }

    pub fn in_ju(&self, w_plus: f64) -> bool {
        w_plus > self.ju_lo && w_plus <= self.j_hi + JU_UPPER_SLACK
    }

    /// The right-end decay rate of `u*`, `(chi / alpha) kappa_plus`.
    pub fn u_right_rate(&self, params: &ModelParams) -> f64 {
        params.chi / params.alpha * self.kappa_plus
    }
}

pub fn derive(params: &ModelParams) -> Result<DerivedQuantities> {
    let violations = validate(params);
    if !violations.is_empty() {
        return Err(Error::InvalidParams(violations));
    }
    let ModelParams {
        alpha,
        chi,
        gamma,
        l,
        c,
        d,
    } = *params;
    let a = c / chi;
    let mu = 2.0 * a + c;
    let nu = a * a + a * c + gamma;
    let s = (c * c - 4.0 * gamma).sqrt();
    // c - s = 4 gamma / (c + s) avoids cancellation for large c
    let t_minus = 2.0 * gamma / (c + s);
    let t_plus = 0.5 * (c + s);
    let kappa_plus = -a - t_minus;
    let kappa_minus = -a - t_plus;
    let u_minus = nu / l;
    let maps = ScalarMapContext::new(*params);
    let p0 = (maps.g(u_minus)? / chi).exp();
    let f_prime_p0 = -chi * nu / (alpha + d.d(u_minus));
    let lambda_unstable = 0.5 * (-mu + (mu * mu - 4.0 * f_prime_p0).sqrt());
    Ok(DerivedQuantities {
        a,
        mu,
        nu,
        kappa_plus,
        kappa_minus,
        p0,
        u_minus,
        f_prime_p0,
        lambda_unstable,
        j_lo: -(a + kappa_plus),
        j_hi: -(chi / alpha) * kappa_plus,
        ju_lo: t_plus,
    })
}

/// Restriction R1: `chi > alpha - 2`, or `c^2 > gamma (chi - alpha)^2 / (alpha - chi - 1)`.
pub fn check_r1(params: &ModelParams) -> bool {
    let ModelParams {
        alpha, chi, gamma, c, ..
    } = *params;
    if chi > alpha - 2.0 {
        return true;
    }
    c * c > gamma * (chi - alpha).powi(2) / (alpha - chi - 1.0)
}

/// Restriction R2 together with `w_plus in J_u`.
pub fn check_r2(params: &ModelParams, w_plus: f64) -> bool {
    let ModelParams {
        alpha, chi, gamma, c, ..
    } = *params;
    if !(chi > alpha - 2.0) {
        return false;
    }
    if alpha > 1.0 && !(c * c < gamma * (alpha + chi).powi(2) / ((chi + 1.0) * (alpha - 1.0))) {
        return false;
    }
    match derive(params) {
        Ok(dq) => dq.in_ju(w_plus),
        Err(_) => false,
    }
}

/// Parameters bundled with their derived constants and scalar maps.
#[derive(Debug, Clone, Copy)]
pub struct Model {
    pub params: ModelParams,
    pub derived: DerivedQuantities,
    pub maps: ScalarMapContext,
}

impl Model {
    pub fn new(params: ModelParams) -> Result<Self> {
        let derived = derive(&params)?;
        Ok(Self {
            params,
            derived,
            maps: ScalarMapContext::new(params),
        })
    }

    pub fn reference() -> Self {
        Self::new(ModelParams::reference()).expect("reference parameters are admissible")
    }
}
