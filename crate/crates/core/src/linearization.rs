//! Linearisation of the moving-frame system about the wave.
//!
//! Perturbing `(u, v) = (u*, v*) + (x, y)` gives
//!
//! ```text
//! x_t = a1 x'' + a2 x' + a3 x + a4 y'' + a5 y' + a6 y
//! y_t = a7 x + y'' + c y' + a8 y
//! ```
//!
//! [`ConjugatedOperator`] discretises this operator in the weighted variables
//! `z1 = eta_+ x`, `z2 = eta y`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fd::{derivatives_vec, Scheme};
use crate::model::{DerivedQuantities, ModelParams};
use crate::wave::WaveProfile;
use crate::weights::WeightSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearizationCoefficients {
    pub xi: Vec<f64>,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub a3: Vec<f64>,
    pub a4: Vec<f64>,
    pub a5: Vec<f64>,
    pub a6: Vec<f64>,
    pub a7: Vec<f64>,
    pub a8: Vec<f64>,
    /// Drift of the chemical equation, the wave speed `c`.
    pub c: f64,
    pub a_plus_limits: [f64; 8],
}

/// `c + (chi / 2)(c - sqrt(c^2 - 4 gamma))`, the right limit of `a2`.
pub fn a2_plus(params: &ModelParams) -> f64 {
    let s = (params.c * params.c - 4.0 * params.gamma).sqrt();
    params.c + 0.5 * params.chi * 4.0 * params.gamma / (params.c + s)
}

/// Limits of `a1..a8` at `+infinity` for the unperturbed wave.
pub fn a_plus_limits(params: &ModelParams) -> [f64; 8] {
    [params.alpha, a2_plus(params), 0.0, 0.0, 0.0, 0.0, 0.0, params.gamma]
}

/// Evaluates `a1..a8` on the profile grid at the base point `wave + (x, y)`.
///
/// With `base = None` all derivatives come from the closed forms along the
/// orbit. Otherwise the derivatives of `x` and `y` are taken by fourth-order
/// differences.
pub fn coefficients(profile: &WaveProfile, base: Option<(&[f64], &[f64])>) -> Result<LinearizationCoefficients> {
    let m = profile.model();
    let prm = m.params;
    let dq: DerivedQuantities = m.derived;
    let n = profile.len();
    let (chi, l) = (prm.chi, prm.l);

    let base_derivs = match base {
        Some((x, y)) => {
            if x.len() != n || y.len() != n {
                return Err(Error::GridMismatch {
                    detail: format!("base has {} / {} points, profile has {n}", x.len(), y.len()),
                });
            }
            let dx = profile.dx();
            let (x1, x2) = derivatives_vec(x, dx, Scheme::Fourth);
            let (y1, y2) = derivatives_vec(y, dx, Scheme::Fourth);
            Some((x, x1, x2, y, y1, y2))
        }
        None => None,
    };

    let mut c = LinearizationCoefficients {
        xi: profile.xi.clone(),
        a1: Vec::with_capacity(n),
        a2: Vec::with_capacity(n),
        a3: Vec::with_capacity(n),
        a4: Vec::with_capacity(n),
        a5: Vec::with_capacity(n),
        a6: Vec::with_capacity(n),
        a7: Vec::with_capacity(n),
        a8: Vec::with_capacity(n),
        c: prm.c,
        a_plus_limits: a_plus_limits(&prm),
    };
    for i in 0..n {
        let w = profile.point(profile.xi[i]);
        let (u, u1, u2, v, r1, r2) = match &base_derivs {
            None => (
                w.u,
                w.u_prime,
                w.u_double_prime,
                w.v,
                dq.a + w.sigma,
                dq.a * dq.a + (2.0 * dq.a - dq.mu) * w.sigma - (dq.nu - l * w.u),
            ),
            Some((x, x1, x2, y, y1, y2)) => {
                let v = w.v + y[i];
                if !(v > 0.0) {
                    return Err(Error::SingularityGuard {
                        detail: format!("v = {v} at xi = {}", profile.xi[i]),
                    });
                }
                (
                    w.u + x[i],
                    w.u_prime + x1[i],
                    w.u_double_prime + x2[i],
                    v,
                    (w.v_prime + y1[i]) / v,
                    (w.v_double_prime + y2[i]) / v,
                )
            }
        };
        let d = prm.d;
        c.a1.push(prm.k(u));
        c.a2.push(prm.c + 2.0 * u1 * d.d_prime(u) - chi * r1);
        c.a3.push(d.d_prime(u) * u2 + d.d_second(u) * u1 * u1 - chi * r2 + chi * r1 * r1);
        c.a4.push(-chi * u / v);
        c.a5.push(-chi / v * (u1 - 2.0 * u * r1));
        c.a6.push(-chi / v * (-u1 * r1 + u * (2.0 * r1 * r1 - r2)));
        c.a7.push(-l * v);
        c.a8.push(prm.gamma - l * u);
    }
    Ok(c)
}

/// Banded matrix with interleaved unknowns `(z1_0, z2_0, z1_1, z2_1, ...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatedOperator {
    pub xi: Vec<f64>,
    pub dx: f64,
    pub bandwidth: usize,
    /// Row `r` holds columns `r - bandwidth ..= r + bandwidth`.
    pub rows: Vec<[f64; 7]>,
}

const BW: usize = 3;

fn check_uniform(xi: &[f64]) -> Result<f64> {
    let n = xi.len();
    if n < 5 {
        return Err(Error::InvalidGrid {
            detail: format!("{n} points"),
        });
    }
    let dx = (xi[n - 1] - xi[0]) / (n - 1) as f64;
    for (i, w) in xi.windows(2).enumerate() {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx {
            return Err(Error::InvalidGrid {
                detail: format!("grid not uniform near index {i}"),
            });
        }
    }
    Ok(dx)
}

pub fn assemble_conjugated(coeffs: &LinearizationCoefficients, weights: &WeightSpec) -> Result<ConjugatedOperator> {
    let xi = &coeffs.xi;
    let n = xi.len();
    for (name, a) in [
        ("a1", &coeffs.a1),
        ("a2", &coeffs.a2),
        ("a3", &coeffs.a3),
        ("a4", &coeffs.a4),
        ("a5", &coeffs.a5),
        ("a6", &coeffs.a6),
        ("a7", &coeffs.a7),
        ("a8", &coeffs.a8),
    ] {
        if a.len() != n {
            return Err(Error::GridMismatch {
                detail: format!("{name} has {} entries, grid has {n}", a.len()),
            });
        }
    }
    let dx = check_uniform(xi)?;
    let mut rows = vec![[0.0; 7]; 2 * n];
    rows[0][BW] = 1.0;
    rows[1][BW] = 1.0;
    rows[2 * n - 2][BW] = 1.0;
    rows[2 * n - 1][BW] = 1.0;

    let (im, i0, ip) = (1.0 / (dx * dx), -2.0 / (dx * dx), 1.0 / (dx * dx));
    let h = 0.5 / dx;
    // second-order stencil weights for (c2 D2 + c1 D1 + c0) at offsets -1, 0, +1
    let stencil = |c2: f64, c1: f64, c0: f64| [c2 * im - c1 * h, c2 * i0 + c0, c2 * ip + c1 * h];

    for i in 1..n - 1 {
        let x = xi[i];
        let (_, g1, g2) = weights.log_eta_plus(x);
        let (lm, _, _) = weights.log_eta_minus(x);
        let (_, big1, big2) = weights.log_eta(x);
        let inv_em = (-lm).exp();
        let em = lm.exp();
        let (a1, a2, a3) = (coeffs.a1[i], coeffs.a2[i], coeffs.a3[i]);
        let (a4, a5, a6) = (coeffs.a4[i] * inv_em, coeffs.a5[i] * inv_em, coeffs.a6[i] * inv_em);

        let s11 = stencil(a1, a2 - 2.0 * a1 * g1, a1 * (g1 * g1 - g2) - a2 * g1 + a3);
        let s12 = stencil(a4, a5 - 2.0 * a4 * big1, a4 * (big1 * big1 - big2) - a5 * big1 + a6);
        let c = coeffs.c;
        let s22 = stencil(1.0, c - 2.0 * big1, big1 * big1 - big2 - c * big1 + coeffs.a8[i]);
        let a7 = em * coeffs.a7[i];

        let r1 = 2 * i;
        let r2 = 2 * i + 1;
        for (k, off) in [-1i64, 0, 1].iter().enumerate() {
            let col1 = (2 * i as i64 + 2 * off) as usize;
            let col2 = col1 + 1;
            rows[r1][BW + col1 - r1] += s11[k];
            rows[r1][BW + col2 - r1] += s12[k];
            rows[r2][BW + col2 - r2] += s22[k];
        }
        rows[r2][BW + 2 * i - r2] += a7;
    }
    Ok(ConjugatedOperator {
        xi: xi.clone(),
        dx,
        bandwidth: BW,
        rows,
    })
}

impl ConjugatedOperator {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        let n = self.rows.len();
        assert_eq!(z.len(), n, "vector length must match operator dimension");
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &a) in row.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let col = r as i64 + k as i64 - BW as i64;
                if col >= 0 && (col as usize) < n {
                    acc += a * z[col as usize];
                }
            }
            out[r] = acc;
        }
        out
    }

    pub fn apply_real(&self, z: &[f64]) -> Vec<f64> {
        let zc: Vec<Complex64> = z.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.apply(&zc).into_iter().map(|c| c.re).collect()
    }
}

/// Smooth compactly supported bump on `[center - width/2, center + width/2]`,
/// normalised to peak value one.
pub fn bump(xi: f64, center: f64, width: f64) -> f64 {
    let s = 2.0 * (xi - center) / width;
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// `|(A - lambda) phi| / |phi|` in the discrete sup norm for the windowed
/// mode `phi = (0, bump e^{i h xi})`.
pub fn weyl_residual(op: &ConjugatedOperator, lambda: Complex64, h: f64, window: (f64, f64)) -> Result<f64> {
    let (center, width) = window;
    let n = op.xi.len();
    let lo = center - 0.5 * width;
    let hi = center + 0.5 * width;
    let min = 0.0f64.max(op.xi[0]);
    let max = op.xi[n - 1] - 2.0 * op.dx;
    if !(width > 0.0) || lo < min || hi > max {
        return Err(Error::WindowOutsideGrid { lo, hi, min, max });
    }
    let mut phi = vec![Complex64::new(0.0, 0.0); 2 * n];
    for i in 0..n {
        let x = op.xi[i];
        phi[2 * i + 1] = bump(x, center, width) * Complex64::from_polar(1.0, h * x);
    }
    let a = op.apply(&phi);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for k in 0..2 * n {
        num = num.max((a[k] - lambda * phi[k]).norm());
        den = den.max(phi[k].norm());
    }
    if den == 0.0 {
        return Err(Error::WindowOutsideGrid { lo, hi, min, max });
    }
    Ok(num / den)
}
