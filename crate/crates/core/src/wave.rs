//! Heteroclinic orbit of `p'' + mu p' + f(p) = 0` and the travelling wave built
//! from it.
//!
//! The orbit leaves the saddle `(p0, 0)` along its unstable direction and
//! is integrated until `p` drops below `p_stop`. Outside the integrated range
//! the profile is continued by the linear unstable manifold on the left and by
//! the exponential asymptote on the right, so any grid can be sampled.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DerivedQuantities, Model};
use crate::ode::{Control, Dopri5};
use crate::scalar_maps::ScalarMapContext;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitOptions {
    /// Offset along the unstable direction; `None` means `1e-8 * p0`.
    pub eps0: Option<f64>,
    pub rk_tol: f64,
    pub p_stop: f64,
    pub xi_span_max: f64,
    pub output_dx: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            eps0: None,
            rk_tol: 1e-11,
            p_stop: 1e-60,
            xi_span_max: 400.0,
            output_dx: 0.01,
        }
    }
}

impl OrbitOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.eps0 {
            if !(e > 0.0) {
                return Err(Error::NonPositive { what: "eps0", value: e });
            }
        }
        for (what, value) in [
            ("rk_tol", self.rk_tol),
            ("p_stop", self.p_stop),
            ("xi_span_max", self.xi_span_max),
            ("output_dx", self.output_dx),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositive { what, value });
            }
        }
        if self.p_stop < 1e-280 {
            return Err(Error::InvalidOption {
                detail: format!("p_stop = {} is too close to underflow", self.p_stop),
            });
        }
        Ok(())
    }
}

/// Accepted integrator nodes, with `xi = 0` at the shooting start.
#[derive(Debug, Clone, PartialEq)]
pub struct RawOrbit {
    pub xi: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Unit vector `-(1, lambda_u) / |(1, lambda_u)|` along which the orbit leaves `(p0, 0)`.
pub fn unstable_direction(dq: &DerivedQuantities, ctx: &ScalarMapContext) -> Result<[f64; 2]> {
    let fp = ctx.f_prime(dq.p0);
    if !(fp < 0.0) {
        return Err(Error::DegenerateSaddle { f_prime_p0: fp });
    }
    let lambda = 0.5 * (-dq.mu + (dq.mu * dq.mu - 4.0 * fp).sqrt());
    let norm = (1.0 + lambda * lambda).sqrt();
    Ok([-1.0 / norm, -lambda / norm])
}

pub fn shoot(dq: &DerivedQuantities, ctx: &ScalarMapContext, opts: &OrbitOptions) -> Result<RawOrbit> {
    opts.validate()?;
    let threshold = 2.0 * dq.nu.sqrt();
    if !(dq.mu > threshold) {
        return Err(Error::SpeedBelowMinimum { mu: dq.mu, threshold });
    }
    let dir = unstable_direction(dq, ctx)?;
    let eps0 = opts.eps0.unwrap_or(1e-8 * dq.p0);
    let y0 = [dq.p0 + eps0 * dir[0], eps0 * dir[1]];
    let mu = dq.mu;
    let rhs = |_: f64, y: &[f64; 2]| [y[1], -ctx.f(y[0]) - mu * y[1]];

    let mut solver = Dopri5::new(opts.rk_tol);
    solver.h_init = 1e-2;
    solver.h_max = 0.25;
    let mut prev_p = y0[0];
    let p_stop = opts.p_stop;
    let nodes = solver.integrate(rhs, 0.0, y0, opts.xi_span_max, |xi, y| {
        if !(y[0] < prev_p) || !(y[1] < 0.0) {
            return Control::Abort(Error::MonotonicityViolated { xi, p: y[0], q: y[1] });
        }
        prev_p = y[0];
        if y[0] <= p_stop {
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    let last = nodes.last().expect("integrator returns the initial node");
    if last.1[0] > p_stop {
        return Err(Error::SpanExceeded {
            span: last.0,
            p: last.1[0],
        });
    }
    Ok(RawOrbit {
        xi: nodes.iter().map(|n| n.0).collect(),
        p: nodes.iter().map(|n| n.1[0]).collect(),
        q: nodes.iter().map(|n| n.1[1]).collect(),
    })
}

/// Wave quantities at one point of the moving frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePoint {
    pub p: f64,
    pub q: f64,
    pub log_p: f64,
    /// `q / p`, the logarithmic derivative of `p`.
    pub sigma: f64,
    pub sigma_prime: f64,
    pub u: f64,
    pub u_prime: f64,
    pub u_double_prime: f64,
    pub v: f64,
    pub v_prime: f64,
    pub v_double_prime: f64,
}

/// Dense representation of the phase-fixed orbit.
#[derive(Debug, Clone)]
pub struct Orbit {
    model: Model,
    xi: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
    dq_: Vec<f64>,
    ddq: Vec<f64>,
    lambda_u: f64,
    kappa_end: f64,
    xi_shift: f64,
}

#[inline]
fn quintic_hermite(t: f64, h: f64, y0: [f64; 3], y1: [f64; 3]) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h01 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h02 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h10 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h12 = 0.5 * (t3 - 2.0 * t4 + t5);
    y0[0] * h00 + h * y0[1] * h01 + h * h * y0[2] * h02 + y1[0] * h10 + h * y1[1] * h11 + h * h * y1[2] * h12
}

impl Orbit {
    fn new(raw: &RawOrbit, model: Model) -> Result<Self> {
        let ctx = model.maps;
        let mu = model.derived.mu;
        let n = raw.xi.len();
        if n < 2 {
            return Err(Error::InvalidGrid {
                detail: "orbit has fewer than two nodes".into(),
            });
        }
        let mut dq_ = Vec::with_capacity(n);
        let mut ddq = Vec::with_capacity(n);
        for i in 0..n {
            let (p, q) = (raw.p[i], raw.q[i]);
            let qp = -ctx.f(p) - mu * q;
            dq_.push(qp);
            ddq.push(-ctx.f_prime(p) * q - mu * qp);
        }
        let mut orbit = Self {
            model,
            xi: raw.xi.clone(),
            p: raw.p.clone(),
            q: raw.q.clone(),
            dq_,
            ddq,
            lambda_u: model.derived.lambda_unstable,
            kappa_end: raw.q[n - 1] / raw.p[n - 1],
            xi_shift: 0.0,
        };
        let half = 0.5 * model.derived.p0;
        let k = orbit.p.partition_point(|&p| p > half);
        let shift = if k == 0 {
            orbit.bisect_left_extension(half)
        } else if k >= n {
            return Err(Error::InvalidGrid {
                detail: "orbit never reaches p0 / 2".into(),
            });
        } else {
            let (mut a, mut b) = (orbit.xi[k - 1], orbit.xi[k]);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if orbit.state(m).0 > half {
                    a = m;
                } else {
                    b = m;
                }
                if b - a <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
                    break;
                }
            }
            0.5 * (a + b)
        };
        for x in orbit.xi.iter_mut() {
            *x -= shift;
        }
        orbit.xi_shift = shift;
        Ok(orbit)
    }

    fn bisect_left_extension(&self, target: f64) -> f64 {
        let delta = self.p[0] - self.model.derived.p0;
        let ratio = (target - self.model.derived.p0) / delta;
        self.xi[0] + ratio.ln() / self.lambda_u
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn xi_shift(&self) -> f64 {
        self.xi_shift
    }

    /// Range covered by integrator nodes, in the phase-fixed coordinate.
    pub fn node_range(&self) -> (f64, f64) {
        (self.xi[0], self.xi[self.xi.len() - 1])
    }

    pub fn nodes(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.xi, &self.p, &self.q)
    }

    /// `(p, q, log p)` at `xi`.
    pub fn state_with_log(&self, xi: f64) -> (f64, f64, f64) {
        let n = self.xi.len();
        let p0 = self.model.derived.p0;
        if xi <= self.xi[0] {
            let delta = (self.p[0] - p0) * (self.lambda_u * (xi - self.xi[0])).exp();
            let p = p0 + delta;
            return (p, self.lambda_u * delta, p.ln());
        }
        if xi >= self.xi[n - 1] {
            let log_p = self.p[n - 1].ln() + self.kappa_end * (xi - self.xi[n - 1]);
            let p = log_p.exp();
            return (p, self.kappa_end * p, log_p);
        }
        let j = self.xi.partition_point(|&x| x <= xi).clamp(1, n - 1);
        let i = j - 1;
        let h = self.xi[j] - self.xi[i];
        let t = (xi - self.xi[i]) / h;
        let p = quintic_hermite(
            t,
            h,
            [self.p[i], self.q[i], self.dq_[i]],
            [self.p[j], self.q[j], self.dq_[j]],
        );
        let q = quintic_hermite(
            t,
            h,
            [self.q[i], self.dq_[i], self.ddq[i]],
            [self.q[j], self.dq_[j], self.ddq[j]],
        );
        (p, q, p.ln())
    }

    pub fn state(&self, xi: f64) -> (f64, f64) {
        let (p, q, _) = self.state_with_log(xi);
        (p, q)
    }

    pub fn point(&self, xi: f64) -> WavePoint {
        let (p, q, log_p) = self.state_with_log(xi);
        let m = &self.model;
        let prm = &m.params;
        let dq = &m.derived;
        let sigma = if p > 0.0 { q / p } else { self.kappa_end };
        let u = m.maps.u_of_log_p(log_p);
        let sigma_prime = -(dq.nu - prm.l * u) - dq.mu * sigma - sigma * sigma;
        let k = prm.k(u);
        let r = prm.chi * sigma / k;
        let u_prime = u * r;
        let r_prime = prm.chi * sigma_prime / k - prm.chi * sigma * prm.d.d_prime(u) * u_prime / (k * k);
        let u_double_prime = u_prime * r + u * r_prime;
        let a = dq.a;
        let v = (a * xi + log_p).exp();
        let v_prime = v * (a + sigma);
        let v_double_prime = v * (a * a + (2.0 * a - dq.mu) * sigma - (dq.nu - prm.l * u));
        WavePoint {
            p,
            q,
            log_p,
            sigma,
            sigma_prime,
            u,
            u_prime,
            u_double_prime,
            v,
            v_prime,
            v_double_prime,
        }
    }
}

/// Travelling wave sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub xi: Vec<f64>,
    pub p_star: Vec<f64>,
    pub q_star: Vec<f64>,
    pub u_star: Vec<f64>,
    pub v_star: Vec<f64>,
    pub u_prime: Vec<f64>,
    pub v_prime: Vec<f64>,
    pub v_double_prime: Vec<f64>,
    pub s1_hat: f64,
    pub s2_hat: f64,
    pub s3_hat: f64,
    pub xi_shift: f64,
    orbit: Arc<Orbit>,
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let dx = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * dx })
        .collect()
}

impl WaveProfile {
    fn from_orbit(orbit: Arc<Orbit>, xi: Vec<f64>) -> Self {
        let n = xi.len();
        let mut out = Self {
            xi: Vec::new(),
            p_star: Vec::with_capacity(n),
            q_star: Vec::with_capacity(n),
            u_star: Vec::with_capacity(n),
            v_star: Vec::with_capacity(n),
            u_prime: Vec::with_capacity(n),
            v_prime: Vec::with_capacity(n),
            v_double_prime: Vec::with_capacity(n),
            s1_hat: 0.0,
            s2_hat: 0.0,
            s3_hat: 0.0,
            xi_shift: orbit.xi_shift,
            orbit,
        };
        for &x in &xi {
            let w = out.orbit.point(x);
            out.p_star.push(w.p);
            out.q_star.push(w.q);
            out.u_star.push(w.u);
            out.v_star.push(w.v);
            out.u_prime.push(w.u_prime);
            out.v_prime.push(w.v_prime);
            out.v_double_prime.push(w.v_double_prime);
        }
        if let Some(&x_last) = xi.last() {
            let m = out.orbit.model;
            let kp = m.derived.kappa_plus;
            let ku = m.derived.u_right_rate(&m.params);
            let w = out.orbit.point(x_last);
            out.s1_hat = (w.log_p - kp * x_last).exp();
            out.s2_hat = (w.u.ln() - ku * x_last).exp();
            out.s3_hat = (w.u_prime.abs().ln() - ku * x_last).exp();
        }
        out.xi = xi;
        out
    }

    pub fn orbit(&self) -> &Orbit {
        &self.orbit
    }

    pub fn model(&self) -> &Model {
        &self.orbit.model
    }

    /// The same wave sampled on another grid.
    pub fn resample(&self, xi: Vec<f64>) -> Self {
        Self::from_orbit(Arc::clone(&self.orbit), xi)
    }

    pub fn on_uniform_grid(&self, lo: f64, hi: f64, n: usize) -> Self {
        self.resample(uniform_grid(lo, hi, n))
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn dx(&self) -> f64 {
        (self.xi[self.xi.len() - 1] - self.xi[0]) / (self.xi.len() - 1) as f64
    }

    pub fn point(&self, xi: f64) -> WavePoint {
        self.orbit.point(xi)
    }

    /// Checks the sign and monotonicity invariants at every grid point.
    pub fn check_invariants(&self) -> Result<()> {
        let kp = self.model().derived.kappa_plus;
        for i in 0..self.len() {
            let (xi, p, q) = (self.xi[i], self.p_star[i], self.q_star[i]);
            if !(p > 0.0 && q < 0.0 && self.u_star[i] > 0.0 && self.v_star[i] > 0.0 && self.u_prime[i] < 0.0) {
                return Err(Error::MonotonicityViolated { xi, p, q });
            }
            if i > 0 {
                let prev_scaled = (self.p_star[i - 1].ln() - kp * self.xi[i - 1]).exp();
                let scaled = (p.ln() - kp * xi).exp();
                let nonincreasing_u = self.u_star[i] <= self.u_star[i - 1];
                if p > self.p_star[i - 1] || !nonincreasing_u || scaled < prev_scaled * (1.0 - 1e-12) {
                    return Err(Error::MonotonicityViolated { xi, p, q });
                }
            }
        }
        Ok(())
    }
}

/// Builds the phase-fixed profile on `[-xi_end, xi_end]` with spacing `output_dx`,
/// where `xi_end` is the end of the integrated orbit.
pub fn assemble(raw: &RawOrbit, model: &Model, opts: &OrbitOptions) -> Result<WaveProfile> {
    let orbit = Arc::new(Orbit::new(raw, *model)?);
    let (lo, hi) = orbit.node_range();
    let hi = hi.max(1.0);
    let lo = lo.min(-hi);
    let n = ((hi - lo) / opts.output_dx).ceil() as usize + 1;
    Ok(WaveProfile::from_orbit(orbit, uniform_grid(lo, hi, n.max(2))))
}

/// Shoots and assembles with the given options.
pub fn compute(model: &Model, opts: &OrbitOptions) -> Result<WaveProfile> {
    let raw = shoot(&model.derived, &model.maps, opts)?;
    assemble(&raw, model, opts)
}

/// Fourth-order centred first and second differences at interior index `i`.
#[inline]
fn d1_4(y: &[f64], i: usize, dx: f64) -> f64 {
    (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * dx)
}

#[inline]
fn d2_4(y: &[f64], i: usize, dx: f64) -> f64 {
    (-y[i - 2] + 16.0 * y[i - 1] - 30.0 * y[i] + 16.0 * y[i + 1] - y[i + 2]) / (12.0 * dx * dx)
}

/// Normalised sup residuals of the planar equation and of the chemical equation.
pub fn residual(profile: &WaveProfile) -> (f64, f64) {
    let m = profile.model();
    let prm = &m.params;
    let dq = &m.derived;
    let n = profile.len();
    if n < 5 {
        return (0.0, 0.0);
    }
    let dx = profile.dx();
    let p = &profile.p_star;
    let v = &profile.v_star;
    let u = &profile.u_star;
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for i in 2..n - 2 {
        let e1 = d2_4(p, i, dx) + dq.mu * d1_4(p, i, dx) + m.maps.f(p[i]);
        let e2 = d2_4(v, i, dx) + prm.c * d1_4(v, i, dx) + prm.gamma * v[i] - prm.l * u[i] * v[i];
        r1 = r1.max(e1.abs());
        r2 = r2.max(e2.abs());
    }
    let sp = p.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let sv = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    (r1 / sp, r2 / sv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub quantity: &'static str,
    pub tail: Tail,
    pub fitted: f64,
    pub target: f64,
}

impl RateFit {
    pub fn error(&self) -> f64 {
        (self.fitted - self.target).abs()
    }
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

/// Log-linear tail fits over the outer fifth of each half-line.
pub fn measure_rates(profile: &WaveProfile) -> Result<Vec<RateFit>> {
    let m = profile.model();
    let dq = &m.derived;
    let xi_min = profile.xi[0];
    let xi_max = profile.xi[profile.len() - 1];
    if !(xi_min < 0.0 && xi_max > 0.0) {
        return Err(Error::InvalidGrid {
            detail: "profile grid must straddle zero".into(),
        });
    }
    let right: Vec<usize> = (0..profile.len()).filter(|&i| profile.xi[i] >= 0.8 * xi_max).collect();
    let left: Vec<usize> = (0..profile.len()).filter(|&i| profile.xi[i] <= 0.8 * xi_min).collect();
    if right.len() < 3 || left.len() < 3 {
        return Err(Error::InsufficientTail {
            quantity: "grid",
            efolds: 0.0,
        });
    }

    let points_r: Vec<WavePoint> = right.iter().map(|&i| profile.point(profile.xi[i])).collect();
    let points_l: Vec<WavePoint> = left.iter().map(|&i| profile.point(profile.xi[i])).collect();
    let efolds_r = points_r[0].log_p - points_r[points_r.len() - 1].log_p;
    if efolds_r < 10.0 {
        return Err(Error::InsufficientTail {
            quantity: "p_star right tail",
            efolds: efolds_r,
        });
    }
    let log_v = |w: &WavePoint| w.v.ln();
    let efolds_l = log_v(&points_l[points_l.len() - 1]) - log_v(&points_l[0]);
    if efolds_l < 10.0 {
        return Err(Error::InsufficientTail {
            quantity: "v_star left tail",
            efolds: efolds_l,
        });
    }

    let xr: Vec<f64> = right.iter().map(|&i| profile.xi[i]).collect();
    let xl: Vec<f64> = left.iter().map(|&i| profile.xi[i]).collect();
    let fit = |x: &[f64], pts: &[WavePoint], g: &dyn Fn(&WavePoint) -> f64| {
        let y: Vec<f64> = pts.iter().map(|w| g(w).abs().ln()).collect();
        slope(x, &y)
    };
    let u_rate = dq.u_right_rate(&m.params);
    let v_rate = dq.kappa_plus + dq.a;
    type Getter = fn(&WavePoint) -> f64;
    let right_q: [(&'static str, Getter, f64); 5] = [
        ("u_star", |w| w.u, u_rate),
        ("u_prime", |w| w.u_prime, u_rate),
        ("v_star", |w| w.v, v_rate),
        ("v_prime", |w| w.v_prime, v_rate),
        ("v_double_prime", |w| w.v_double_prime, v_rate),
    ];
    let left_q: [(&'static str, Getter, f64); 3] = [
        ("v_star", |w| w.v, dq.a),
        ("v_prime", |w| w.v_prime, dq.a),
        ("v_double_prime", |w| w.v_double_prime, dq.a),
    ];
    let mut out = Vec::with_capacity(8);
    for (quantity, g, target) in right_q {
        out.push(RateFit {
            quantity,
            tail: Tail::Right,
            fitted: fit(&xr, &points_r, &g),
            target,
        });
    }
    for (quantity, g, target) in left_q {
        out.push(RateFit {
            quantity,
            tail: Tail::Left,
            fitted: fit(&xl, &points_l, &g),
            target,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiffusionPerturbation, ModelParams};
    use std::sync::OnceLock;

    fn reference_wave() -> &'static WaveProfile {
        static W: OnceLock<WaveProfile> = OnceLock::new();
        W.get_or_init(|| compute(&Model::reference(), &OrbitOptions::default()).unwrap())
    }

    #[test]
    fn direction_is_unstable_eigenvector() {
        let m = Model::reference();
        let dir = unstable_direction(&m.derived, &m.maps).unwrap();
        let lam = dir[1] / dir[0];
        assert!((lam * lam + 9.0 * lam - 19.0).abs() < 1e-12);
        assert!(dir[0] < 0.0 && dir[1] < 0.0);
        assert!((dir[0].hypot(dir[1]) - 1.0).abs() < 1e-15);
        assert!((lam - m.derived.lambda_unstable).abs() < 1e-12);
    }

    #[test]
    fn degenerate_saddle_is_rejected() {
        let m = Model::reference();
        let (mut a, mut b) = (1e-6, m.derived.p0);
        for _ in 0..200 {
            let c = 0.5 * (a + b);
            if m.maps.f_prime(c) > 0.0 {
                a = c;
            } else {
                b = c;
            }
        }
        let mut dq = m.derived;
        dq.p0 = a;
        assert!(matches!(
            unstable_direction(&dq, &m.maps),
            Err(Error::DegenerateSaddle { .. })
        ));
    }

    #[test]
    fn shooting_reaches_p_stop() {
        let m = Model::reference();
        let raw = shoot(&m.derived, &m.maps, &OrbitOptions::default()).unwrap();
        let n = raw.p.len();
        assert!(raw.p[n - 1] <= 1e-60);
        assert!(raw.q.iter().all(|&q| q < 0.0));
        assert!(raw.p.windows(2).all(|w| w[1] < w[0]));
        assert!((raw.q[n - 1] / raw.p[n - 1] - m.derived.kappa_plus).abs() < 1e-3);
    }

    #[test]
    fn subcritical_speed_fails_before_integration() {
        let params = ModelParams {
            c: 2.0,
            ..ModelParams::reference()
        };
        assert!(Model::new(params).is_err());
        let mut dq = Model::reference().derived;
        dq.mu = 2.0 * dq.nu.sqrt();
        let ctx = ScalarMapContext::new(ModelParams::reference());
        assert!(matches!(
            shoot(&dq, &ctx, &OrbitOptions::default()),
            Err(Error::SpeedBelowMinimum { .. })
        ));
    }

    #[test]
    fn tiny_span_is_reported() {
        let opts = OrbitOptions {
            xi_span_max: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            compute(&Model::reference(), &opts),
            Err(Error::SpanExceeded { .. })
        ));
    }

    #[test]
    fn profile_limits_and_phase() {
        let w = reference_wave();
        assert!((w.u_star[0] - 19.0).abs() < 1e-4);
        assert!((w.v_star[0] * (-3.0 * w.xi[0]).exp() - 19.0).abs() < 1e-4);
        assert!(w.u_prime.iter().all(|&d| d < 0.0));
        assert!((w.point(0.0).p - 9.5).abs() < 1e-12);
        let last = w.len() - 1;
        assert!(w.u_star[last] < 1e-50 && w.v_star[last] < 1e-4);
        w.check_invariants().unwrap();
        assert!(w.s1_hat > 0.0 && w.s2_hat > 0.0 && w.s3_hat > 0.0);
    }

    #[test]
    fn first_integral_holds() {
        let w = reference_wave().on_uniform_grid(-30.0, 30.0, 3001);
        let m = w.model();
        for i in 0..w.len() {
            let g = m.maps.g(w.u_star[i]).unwrap();
            let e = g - m.params.chi * w.v_star[i].ln() + m.params.c * w.xi[i];
            assert!(e.abs() <= 1e-10, "xi = {}: {e}", w.xi[i]);
        }
    }

    #[test]
    fn residuals_converge() {
        let w = reference_wave();
        let fine = w.on_uniform_grid(-30.0, 30.0, 1 << 14);
        let (r1, r2) = residual(&fine);
        assert!(r1 <= 1e-6 && r2 <= 1e-5, "{r1} {r2}");
        let coarse = w.on_uniform_grid(-30.0, 30.0, 1 << 8);
        let (c1, _) = residual(&coarse);
        assert!(c1 > 100.0 * r1);
    }

    #[test]
    fn equilibrium_has_zero_residual() {
        let n = 64;
        let p0 = 19.0;
        let mu = 9.0;
        let ctx = ScalarMapContext::new(ModelParams::reference());
        let p = vec![p0; n];
        let dx = 0.1;
        for i in 2..n - 2 {
            assert!((d2_4(&p, i, dx) + mu * d1_4(&p, i, dx) + ctx.f(p[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_rates_match_targets() {
        let rates = measure_rates(reference_wave()).unwrap();
        assert_eq!(rates.len(), 8);
        for r in &rates {
            assert!(r.error() < 1e-2, "{r:?}");
        }
        let grid = reference_wave().on_uniform_grid(-30.0, 30.0, 6001);
        for r in measure_rates(&grid).unwrap() {
            assert!(r.error() < 1e-2, "{r:?}");
        }
    }

    #[test]
    fn short_tail_is_rejected() {
        let grid = reference_wave().on_uniform_grid(-3.0, 3.0, 601);
        assert!(matches!(
            measure_rates(&grid),
            Err(Error::InsufficientTail { .. })
        ));
    }

    #[test]
    fn halving_eps0_keeps_profile() {
        let m = Model::reference();
        let a = compute(&m, &OrbitOptions::default()).unwrap();
        let b = compute(
            &m,
            &OrbitOptions {
                eps0: Some(0.5e-8 * m.derived.p0),
                ..Default::default()
            },
        )
        .unwrap();
        let ga = a.on_uniform_grid(-30.0, 30.0, 4001);
        let gb = b.on_uniform_grid(-30.0, 30.0, 4001);
        let diff = (0..ga.len())
            .map(|i| (ga.p_star[i] - gb.p_star[i]).abs().max((ga.u_star[i] - gb.u_star[i]).abs()))
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn nonlinear_diffusion_families() {
        for d in [DiffusionPerturbation::linear(1.0), DiffusionPerturbation::quadratic(0.02)] {
            let m = Model::new(ModelParams {
                d,
                ..ModelParams::reference()
            })
            .unwrap();
            let w = compute(&m, &OrbitOptions::default()).unwrap();
            w.check_invariants().unwrap();
            assert!((w.u_star[0] - m.derived.u_minus).abs() < 1e-4 * m.derived.u_minus);
            let g = w.on_uniform_grid(-30.0, 30.0, 1 << 13);
            let (r1, _) = residual(&g);
            assert!(r1 < 1e-5, "{r1}");
        }
    }
}
