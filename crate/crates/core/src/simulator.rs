//! Method-of-lines evolution of perturbations of the travelling wave.
//!
//! The state is a deviation `(x, rho)` from the sampled wave, with
//! `u = u* + x` and `p = p* (1 + rho)`. The chemical deviation in the
//! original variable is `y = e^{a xi} p* rho`. Two right-hand sides are
//! available:
//!
//! * [`BaseMode::Exact`] subtracts the wave equations analytically, so the
//!   unperturbed wave is an exact steady state of the semi-discrete system
//!   and only the perturbation is discretised.
//! * [`BaseMode::Discrete`] differentiates the full fields `u` and `log p`
//!   on the grid, so the wave itself drifts at the truncation error.
//!
//! Time stepping is classical RK4 with both endpoints held fixed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{self, Scheme};
use crate::fit::{fit_growth, GrowthFit};
use crate::linearization::bump;
use crate::model::Model;
use crate::wave::{uniform_grid, WaveProfile};
use crate::weights::WeightSpec;

/// Largest admissible `|kappa_+| * l_plus`, keeping `p*` representable.
pub const MAX_RIGHT_EXPONENT: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub l_minus: f64,
    pub l_plus: f64,
    pub n: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            l_minus: -30.0,
            l_plus: 40.0,
            n: 8192,
        }
    }
}

impl Grid {
    pub fn new(l_minus: f64, l_plus: f64, n: usize) -> Self {
        Self { l_minus, l_plus, n }
    }

    pub fn dx(&self) -> f64 {
        (self.l_plus - self.l_minus) / (self.n - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        uniform_grid(self.l_minus, self.l_plus, self.n)
    }

    /// The grid with every cell halved, `n -> 2n - 1`.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n - 1,
            ..*self
        }
    }

    pub fn validate(&self, model: &Model) -> Result<()> {
        let bad = |detail: String| Err(Error::InvalidGrid { detail });
        if !(self.l_minus.is_finite() && self.l_plus.is_finite()) {
            return bad("grid ends must be finite".into());
        }
        if !(self.l_minus < 0.0 && self.l_plus > 0.0) {
            return bad(format!("need l_minus < 0 < l_plus, got [{}, {}]", self.l_minus, self.l_plus));
        }
        if self.n < 8 {
            return bad(format!("need at least 8 nodes, got {}", self.n));
        }
        let e = model.derived.kappa_plus.abs() * self.l_plus;
        if e >= MAX_RIGHT_EXPONENT {
            return bad(format!("|kappa_+| * l_plus = {e:.1} must stay below {MAX_RIGHT_EXPONENT}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMode {
    #[default]
    Exact,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimOptions {
    pub scheme: Scheme,
    pub base_mode: BaseMode,
    pub cfl: f64,
    pub p_floor: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            scheme: Scheme::Fourth,
            base_mode: BaseMode::Exact,
            cfl: 0.4,
            p_floor: 1e-280,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// Gaussian envelope `exp(-((xi - center) / width)^2)`.
    #[default]
    GaussianWeighted,
    /// Compactly supported smooth window of total width `width`.
    FourierWindowed,
}

/// Initial chemical deviation `y0 = A eta^{-1} bump(xi) cos(h xi)`, rescaled
/// so that its discrete `D` norm is exactly `amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub carrier_h: f64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Self {
            kind: PerturbationKind::GaussianWeighted,
            amplitude: 1e-6,
            center: 15.0,
            width: 5.0,
            carrier_h: 0.0,
        }
    }
}

impl Perturbation {
    pub fn validate(&self) -> Result<()> {
        let bad = |detail: String| Err(Error::InvalidOption { detail });
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return bad(format!("perturbation amplitude must be positive, got {}", self.amplitude));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return bad(format!("perturbation width must be positive, got {}", self.width));
        }
        if !(self.center.is_finite() && self.carrier_h.is_finite()) {
            return bad("perturbation center and carrier must be finite".into());
        }
        Ok(())
    }

    fn envelope(&self, xi: f64) -> f64 {
        let env = match self.kind {
            PerturbationKind::GaussianWeighted => {
                let s = (xi - self.center) / self.width;
                (-s * s).exp()
            }
            PerturbationKind::FourierWindowed => bump(xi, self.center, self.width),
        };
        env * (self.carrier_h * xi).cos()
    }
}

/// Deviation from the wave at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
}

/// One sample of the norm history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormSample {
    pub t: f64,
    pub norm_x: f64,
    pub norm_d: f64,
    pub min_weighted_v: f64,
}

pub type NormTrace = Vec<NormSample>;

#[derive(Debug, Default)]
struct Scratch {
    k: [Vec<f64>; 8],
    tx: Vec<f64>,
    tr: Vec<f64>,
    aux: [Vec<f64>; 6],
    rhs: [Vec<f64>; 6],
}

/// The wave and weight sampled on a simulation grid, plus RK4 buffers.
#[derive(Debug)]
pub struct Simulator {
    model: Model,
    grid: Grid,
    xi: Vec<f64>,
    dx: f64,
    opts: SimOptions,
    weights: WeightSpec,
    u: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    sigma: Vec<f64>,
    sigma1: Vec<f64>,
    log_p: Vec<f64>,
    eta_plus: Vec<f64>,
    /// `eta e^{a xi} p*`, the factor turning `rho` into `eta y`.
    gauge: Vec<f64>,
    c1: Vec<f64>,
    c20: Vec<f64>,
    c21: Vec<f64>,
    /// Smallest admissible `p / p*` at each node.
    min_ratio: Vec<f64>,
    wave_norm_d: f64,
    scratch: Scratch,
}

#[inline]
fn sup_abs(w: &[f64], f: &[f64]) -> f64 {
    w.iter().zip(f).fold(0.0f64, |m, (a, b)| m.max((a * b).abs()))
}

impl Simulator {
    pub fn new(wave: &WaveProfile, grid: Grid, weights: WeightSpec, opts: SimOptions) -> Result<Self> {
        let model = *wave.model();
        grid.validate(&model)?;
        if !(opts.cfl > 0.0 && opts.cfl.is_finite()) {
            return Err(Error::InvalidOption {
                detail: format!("cfl must be positive, got {}", opts.cfl),
            });
        }
        let xi = grid.nodes();
        let n = xi.len();
        let a = model.derived.a;
        let mut s = Self {
            model,
            grid,
            dx: grid.dx(),
            opts,
            weights,
            u: Vec::with_capacity(n),
            u1: Vec::with_capacity(n),
            u2: Vec::with_capacity(n),
            sigma: Vec::with_capacity(n),
            sigma1: Vec::with_capacity(n),
            log_p: Vec::with_capacity(n),
            eta_plus: Vec::with_capacity(n),
            gauge: Vec::with_capacity(n),
            c1: Vec::with_capacity(n),
            c20: Vec::with_capacity(n),
            c21: Vec::with_capacity(n),
            min_ratio: Vec::with_capacity(n),
            wave_norm_d: 0.0,
            scratch: Scratch::default(),
            xi,
        };
        for &x in &s.xi {
            let w = wave.point(x);
            let (sg, sg1) = (w.sigma, w.sigma_prime);
            s.u.push(w.u);
            s.u1.push(w.u_prime);
            s.u2.push(w.u_double_prime);
            s.sigma.push(sg);
            s.sigma1.push(sg1);
            s.log_p.push(w.log_p);
            s.eta_plus.push(weights.eta_plus(x));
            s.gauge.push((weights.log_eta(x).0 + a * x + w.log_p).exp());
            s.c1.push(a + sg);
            s.c20.push(a * a + 2.0 * a * sg + sg1 + sg * sg);
            s.c21.push(2.0 * (a + sg));
            s.min_ratio.push((opts.p_floor.ln() - w.log_p).exp());
        }
        let nd = |w: &[f64], f: &[f64]| sup_abs(w, f);
        let ones = vec![1.0; n];
        s.wave_norm_d = nd(&s.eta_plus, &s.u)
            + nd(&s.eta_plus, &s.u1)
            + nd(&s.eta_plus, &s.u2)
            + nd(&s.gauge, &ones)
            + nd(&s.gauge, &s.c1)
            + nd(&s.gauge, &s.c20);
        s.scratch = Scratch {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tx: vec![0.0; n],
            tr: vec![0.0; n],
            aux: std::array::from_fn(|_| vec![0.0; n]),
            rhs: std::array::from_fn(|_| vec![0.0; n]),
        };
        Ok(s)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn options(&self) -> SimOptions {
        self.opts
    }

    pub fn weights(&self) -> WeightSpec {
        self.weights
    }

    /// `D` norm of the wave `(u*, v*)` itself.
    pub fn wave_norm_d(&self) -> f64 {
        self.wave_norm_d
    }

    /// The unperturbed wave.
    pub fn wave_state(&self) -> SimState {
        SimState {
            t: 0.0,
            x: vec![0.0; self.xi.len()],
            rho: vec![0.0; self.xi.len()],
        }
    }

    /// `(u, p)` for a state.
    pub fn fields(&self, state: &SimState) -> (Vec<f64>, Vec<f64>) {
        let u = self.u.iter().zip(&state.x).map(|(a, b)| a + b).collect();
        let p = self
            .log_p
            .iter()
            .zip(&state.rho)
            .map(|(lp, r)| lp.exp() * (1.0 + r))
            .collect();
        (u, p)
    }

    /// Deviation of arbitrary positive fields from the wave.
    pub fn state_from_fields(&self, t: f64, u: &[f64], p: &[f64]) -> Result<SimState> {
        self.check_len(u.len())?;
        self.check_len(p.len())?;
        let x = u.iter().zip(&self.u).map(|(a, b)| a - b).collect();
        let rho = p
            .iter()
            .zip(&self.log_p)
            .map(|(&pi, lp)| if pi > 0.0 { (pi.ln() - lp).exp_m1() } else { -1.0 })
            .collect();
        Ok(SimState { t, x, rho })
    }

    /// `v = e^{a xi} p` for a state.
    pub fn v_field(&self, state: &SimState) -> Vec<f64> {
        let a = self.model.derived.a;
        self.xi
            .iter()
            .zip(&self.log_p)
            .zip(&state.rho)
            .map(|((x, lp), r)| (a * x + lp).exp() * (1.0 + r))
            .collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.xi.len() {
            return Err(Error::GridMismatch {
                detail: format!("field has {len} nodes, grid has {}", self.xi.len()),
            });
        }
        Ok(())
    }

    /// Largest stable step, `cfl dx^2 / max(sup k(u), 1)`.
    pub fn dt_bound(&self, state: &SimState) -> f64 {
        let p = &self.model.params;
        let kmax = self
            .u
            .iter()
            .zip(&state.x)
            .fold(1.0f64, |m, (a, b)| m.max(p.k(a + b)));
        self.opts.cfl * self.dx * self.dx / kmax
    }

    /// Time derivatives `(x_t, rho_t)`; endpoint tendencies are zero.
    pub fn rhs(&self, x: &[f64], rho: &[f64], out_x: &mut [f64], out_rho: &mut [f64]) -> Result<()> {
        let n = self.xi.len();
        let mut buf: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; n]);
        self.rhs_with(x, rho, out_x, out_rho, &mut buf)
    }

    fn rhs_with(&self, x: &[f64], rho: &[f64], ox: &mut [f64], or: &mut [f64], buf: &mut [Vec<f64>; 6]) -> Result<()> {
        let n = self.xi.len();
        self.check_len(x.len())?;
        self.check_len(rho.len())?;
        self.guard_all(rho)?;
        ox[0] = 0.0;
        or[0] = 0.0;
        ox[n - 1] = 0.0;
        or[n - 1] = 0.0;
        match self.opts.base_mode {
            BaseMode::Exact => self.rhs_exact(x, rho, ox, or, buf),
            BaseMode::Discrete => self.rhs_discrete(x, rho, ox, or, buf),
        }
        Ok(())
    }

    fn guard_all(&self, rho: &[f64]) -> Result<()> {
        let ok = rho
            .iter()
            .zip(&self.min_ratio)
            .fold(true, |ok, (r, m)| ok & (1.0 + r > *m) & (1.0 + r > 0.0));
        if ok {
            return Ok(());
        }
        let i = (0..rho.len())
            .find(|&i| !(1.0 + rho[i] > self.min_ratio[i] && 1.0 + rho[i] > 0.0))
            .unwrap_or(0);
        Err(Error::SingularityGuard {
            detail: format!(
                "p = {:e} at xi = {} fell below the floor {:e}",
                self.log_p[i].exp() * (1.0 + rho[i]),
                self.xi[i],
                self.opts.p_floor
            ),
        })
    }

    fn rhs_exact(&self, x: &[f64], rho: &[f64], ox: &mut [f64], or: &mut [f64], buf: &mut [Vec<f64>; 6]) {
        let pr = &self.model.params;
        let (chi, l, mu) = (pr.chi, pr.l, self.model.derived.mu);
        let dd = pr.d;
        let n = x.len();
        let [x1, x2, r1, r2, ..] = buf;
        fd::interior_all(x, self.dx, self.opts.scheme, x1, x2);
        fd::interior_all(rho, self.dx, self.opts.scheme, r1, r2);
        let (u0, u1, u2) = (&self.u[..n], &self.u1[..n], &self.u2[..n]);
        let (s0, s1) = (&self.sigma[..n], &self.sigma1[..n]);
        let (x1, x2, r1, r2) = (&x1[..n], &x2[..n], &r1[..n], &r2[..n]);
        let (ox, or, rho) = (&mut ox[..n], &mut or[..n], &rho[..n]);
        let plain = dd.coefficient == 0.0;
        for i in 1..n - 1 {
            let (us, us1) = (u0[i], u1[i]);
            let (sg, sg1) = (s0[i], s1[i]);
            let (xv, dx1, dx2, dr1, dr2) = (x[i], x1[i], x2[i], r1[i], r2[i]);
            let u = us + xv;
            let up = us1 + dx1;
            let one = 1.0 + rho[i];
            let inv = 1.0 / one;
            let tau = dr1 * inv;
            let tau1 = dr2 * inv - tau * tau;
            let mut xt = pr.alpha * dx2 - chi * (dx1 * sg + xv * sg1 + up * tau + u * tau1);
            if !plain {
                let dk = dd.d_increment(us, xv);
                let dk_prime = dd.d_prime_increment(us, xv) * up + dd.d_prime(us) * dx1;
                xt += dd.d(u) * dx2 + dd.d_prime(u) * up * dx1 + dk_prime * us1 + dk * u2[i];
            }
            ox[i] = xt;
            or[i] = dr2 + (2.0 * sg + mu) * dr1 - l * xv * one;
        }
    }

    fn rhs_discrete(&self, x: &[f64], rho: &[f64], ox: &mut [f64], or: &mut [f64], buf: &mut [Vec<f64>; 6]) {
        let n = x.len();
        let [u, lp, rest @ ..] = buf;
        for i in 0..n {
            u[i] = self.u[i] + x[i];
            lp[i] = self.log_p[i] + rho[i].ln_1p();
        }
        self.full_tendencies(u, lp, ox, or, rest);
        for i in 1..n - 1 {
            or[i] *= 1.0 + rho[i];
        }
    }

    /// `u_t` and `p_t / p` of the full system from `u` and `log p`.
    fn full_tendencies(&self, u: &[f64], lp: &[f64], udot: &mut [f64], gdot: &mut [f64], d: &mut [Vec<f64>; 4]) {
        let pr = &self.model.params;
        let dq = &self.model.derived;
        let n = u.len();
        let [u1, u2, s1, s2] = d;
        fd::interior_all(u, self.dx, self.opts.scheme, u1, u2);
        fd::interior_all(lp, self.dx, self.opts.scheme, s1, s2);
        for i in 1..n - 1 {
            let (a1, a2, b1, b2) = (u1[i], u2[i], s1[i], s2[i]);
            udot[i] = pr.k(u[i]) * a2 + pr.d.d_prime(u[i]) * a1 * a1 - pr.chi * (a1 * b1 + u[i] * b2);
            gdot[i] = b2 + b1 * b1 + dq.mu * b1 + dq.nu - pr.l * u[i];
        }
    }

    /// `(u_t, p_t)` of the full system for positive fields on this grid.
    pub fn rhs_fields(&self, u: &[f64], p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_len(u.len())?;
        self.check_len(p.len())?;
        let floor = self.opts.p_floor;
        if let Some(i) = p.iter().position(|&v| !(v > floor)) {
            return Err(Error::SingularityGuard {
                detail: format!("p = {:e} at xi = {} is not above the floor {floor:e}", p[i], self.xi[i]),
            });
        }
        let n = u.len();
        let lp: Vec<f64> = p.iter().map(|v| v.ln()).collect();
        let (mut udot, mut pdot) = (vec![0.0; n], vec![0.0; n]);
        let mut d: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
        self.full_tendencies(u, &lp, &mut udot, &mut pdot, &mut d);
        pdot.iter_mut().zip(p).for_each(|(g, v)| *g *= v);
        Ok((udot, pdot))
    }

    /// One RK4 step of size `dt`.
    pub fn step(&mut self, state: &mut SimState, dt: f64) -> Result<()> {
        let bound = self.dt_bound(state);
        if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
            return Err(Error::CflViolated { dt, bound });
        }
        self.rk4(state, dt)
    }

    fn rk4(&mut self, state: &mut SimState, dt: f64) -> Result<()> {
        let mut sc = std::mem::take(&mut self.scratch);
        let result = self.rk4_with(state, dt, &mut sc);
        self.scratch = sc;
        result
    }

    fn rk4_with(&self, state: &mut SimState, dt: f64, sc: &mut Scratch) -> Result<()> {
        let n = state.x.len();
        let [k1x, k1r, k2x, k2r, k3x, k3r, k4x, k4r] = &mut sc.k;
        let (tx, tr) = (&mut sc.tx, &mut sc.tr);
        let buf = &mut sc.rhs;
        self.rhs_with(&state.x, &state.rho, k1x, k1r, buf)?;
        for i in 0..n {
            tx[i] = state.x[i] + 0.5 * dt * k1x[i];
            tr[i] = state.rho[i] + 0.5 * dt * k1r[i];
        }
        self.rhs_with(tx, tr, k2x, k2r, buf)?;
        for i in 0..n {
            tx[i] = state.x[i] + 0.5 * dt * k2x[i];
            tr[i] = state.rho[i] + 0.5 * dt * k2r[i];
        }
        self.rhs_with(tx, tr, k3x, k3r, buf)?;
        for i in 0..n {
            tx[i] = state.x[i] + dt * k3x[i];
            tr[i] = state.rho[i] + dt * k3r[i];
        }
        self.rhs_with(tx, tr, k4x, k4r, buf)?;
        let h = dt / 6.0;
        for i in 0..n {
            state.x[i] += h * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            state.rho[i] += h * (k1r[i] + 2.0 * k2r[i] + 2.0 * k3r[i] + k4r[i]);
        }
        state.t += dt;
        Ok(())
    }

    /// Advances by exactly `duration` with equal steps under the CFL bound.
    pub fn advance(&mut self, state: &mut SimState, duration: f64) -> Result<()> {
        if duration <= 0.0 {
            return Ok(());
        }
        let steps = (duration / self.dt_bound(state)).ceil().max(1.0) as usize;
        let dt = duration / steps as f64;
        let t_end = state.t + duration;
        for _ in 0..steps {
            self.step(state, dt)?;
        }
        state.t = t_end;
        Ok(())
    }

    /// Norms of a deviation: `(norm_X, norm_D, min eta v)`.
    pub fn norms(&mut self, state: &SimState) -> NormSample {
        let mut aux = std::mem::take(&mut self.scratch.aux);
        let [x1, x2, r1, r2, y1, y2] = &mut aux;
        fd::derivatives(&state.x, self.dx, self.opts.scheme, x1, x2);
        fd::derivatives(&state.rho, self.dx, self.opts.scheme, r1, r2);
        for i in 0..state.x.len() {
            let r = state.rho[i];
            y1[i] = self.c1[i] * r + r1[i];
            y2[i] = self.c20[i] * r + self.c21[i] * r1[i] + r2[i];
        }
        let nx = sup_abs(&self.eta_plus, &state.x);
        let ny = sup_abs(&self.gauge, &state.rho);
        let norm_d = nx
            + sup_abs(&self.eta_plus, x1)
            + sup_abs(&self.eta_plus, x2)
            + ny
            + sup_abs(&self.gauge, y1)
            + sup_abs(&self.gauge, y2);
        let min_weighted_v = self
            .gauge
            .iter()
            .zip(&state.rho)
            .fold(f64::INFINITY, |m, (g, r)| m.min(g * (1.0 + r)));
        self.scratch.aux = aux;
        NormSample {
            t: state.t,
            norm_x: nx + ny,
            norm_d,
            min_weighted_v,
        }
    }

    /// The wave plus the requested chemical perturbation, scaled to have
    /// `D` norm `amplitude`. Errors if the perturbed `eta v` is not positive.
    pub fn perturb(&mut self, pert: &Perturbation) -> Result<SimState> {
        pert.validate()?;
        let n = self.xi.len();
        let mut rho: Vec<f64> = (0..n)
            .map(|i| {
                let x = self.xi[i];
                let e = pert.envelope(x);
                if e == 0.0 {
                    0.0
                } else {
                    e / self.gauge[i]
                }
            })
            .collect();
        rho[0] = 0.0;
        rho[n - 1] = 0.0;
        let mut state = SimState {
            t: 0.0,
            x: vec![0.0; n],
            rho,
        };
        let raw = self.norms(&state).norm_d;
        if !(raw > 0.0 && raw.is_finite()) {
            return Err(Error::InvalidOption {
                detail: format!("perturbation vanishes on the grid (D norm {raw:e})"),
            });
        }
        let scale = pert.amplitude / raw;
        state.rho.iter_mut().for_each(|r| *r *= scale);
        let s = self.norms(&state);
        if !(s.min_weighted_v > 0.0) {
            return Err(Error::SingularityGuard {
                detail: format!("perturbed weighted chemical field has min eta v = {:e}", s.min_weighted_v),
            });
        }
        Ok(state)
    }

    /// Evolves to `t_final`, sampling norms every `record_dt`.
    pub fn evolve(&mut self, state: &mut SimState, t_final: f64, record_dt: f64) -> Result<NormTrace> {
        if !(record_dt > 0.0 && record_dt.is_finite()) {
            return Err(Error::InvalidOption {
                detail: format!("record_dt must be positive, got {record_dt}"),
            });
        }
        let mut trace = vec![self.norms(state)];
        let t0 = state.t;
        let records = ((t_final - t0) / record_dt).round().max(0.0) as usize;
        for j in 1..=records {
            let target = t0 + j as f64 * record_dt;
            self.advance(state, target - state.t)?;
            state.t = target;
            trace.push(self.norms(state));
        }
        Ok(trace)
    }
}

/// Parameters of a linear-growth experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstabilityConfig {
    pub t_final: f64,
    pub record_dt: f64,
    /// Upper fit cutoff as a fraction of the wave's own `D` norm.
    pub sat_frac: f64,
    pub perturbation: Perturbation,
}

impl Default for InstabilityConfig {
    fn default() -> Self {
        Self {
            t_final: 8.0,
            record_dt: 0.05,
            sat_frac: 1e-3,
            perturbation: Perturbation::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstabilityResult {
    pub trace: NormTrace,
    pub fit: Option<GrowthFit>,
    pub predicted: f64,
    pub fit_lo: f64,
    pub fit_hi: f64,
}

/// Perturbs the wave, evolves it and fits the growth rate of the `D` norm
/// over `[10 A0, sat_frac * |wave|_D]`.
pub fn run_instability(sim: &mut Simulator, cfg: &InstabilityConfig) -> Result<InstabilityResult> {
    let mut state = sim.perturb(&cfg.perturbation)?;
    let trace = sim.evolve(&mut state, cfg.t_final, cfg.record_dt)?;
    let fit_lo = 10.0 * cfg.perturbation.amplitude;
    let fit_hi = cfg.sat_frac * sim.wave_norm_d();
    let t: Vec<f64> = trace.iter().map(|s| s.t).collect();
    let nd: Vec<f64> = trace.iter().map(|s| s.norm_d).collect();
    let fit = fit_growth(&t, &nd, fit_lo, fit_hi);
    let w = sim.weights().w_plus;
    let predicted = crate::spectrum::max_unstable_real_part(&sim.model().params, w);
    Ok(InstabilityResult {
        trace,
        fit,
        predicted,
        fit_lo,
        fit_hi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EscapeConfig {
    pub epsilon0: f64,
    pub n_max: usize,
    pub amplitude: f64,
}

impl Default for EscapeConfig {
    fn default() -> Self {
        Self {
            epsilon0: 1e-2,
            n_max: 30,
            amplitude: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeResult {
    /// `D` norm after `n` applications of the time-one map, `n = 0, 1, ...`.
    pub norms: Vec<f64>,
    /// First `n` with norm at least `epsilon0`.
    pub escape_n: Option<usize>,
}

/// Iterates the time-one map from a perturbation of norm `cfg.amplitude`
/// until the `D` norm reaches `epsilon0` or `n_max` iterations pass.
pub fn time_one_map_escape(sim: &mut Simulator, shape: &Perturbation, cfg: &EscapeConfig) -> Result<EscapeResult> {
    if !(cfg.epsilon0 > 0.0 && cfg.epsilon0.is_finite()) {
        return Err(Error::InvalidOption {
            detail: format!("epsilon0 must be positive, got {}", cfg.epsilon0),
        });
    }
    let pert = Perturbation {
        amplitude: cfg.amplitude,
        ..*shape
    };
    let mut state = sim.perturb(&pert)?;
    let mut norms = vec![sim.norms(&state).norm_d];
    let mut escape_n = None;
    for n in 0..=cfg.n_max {
        if norms[n] >= cfg.epsilon0 || (n == 0 && cfg.epsilon0 <= cfg.amplitude) {
            escape_n = Some(n);
            break;
        }
        if n == cfg.n_max {
            break;
        }
        let target = state.t + 1.0;
        sim.advance(&mut state, 1.0)?;
        state.t = target;
        norms.push(sim.norms(&state).norm_d);
    }
    Ok(EscapeResult { norms, escape_n })
}
