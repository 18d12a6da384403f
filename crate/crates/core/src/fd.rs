//! Centred finite differences on uniform grids.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Second,
    #[default]
    Fourth,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::Second => 2,
            Scheme::Fourth => 4,
        }
    }
}

/// First and second derivative at an interior index. The fourth-order
/// stencil drops to second order next to the boundary.
#[inline]
pub fn interior(y: &[f64], i: usize, dx: f64, scheme: Scheme) -> (f64, f64) {
    let n = y.len();
    if scheme == Scheme::Fourth && i >= 2 && i + 2 < n {
        let d1 = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * dx);
        let d2 = (-y[i - 2] + 16.0 * y[i - 1] - 30.0 * y[i] + 16.0 * y[i + 1] - y[i + 2]) / (12.0 * dx * dx);
        (d1, d2)
    } else {
        let d1 = (y[i + 1] - y[i - 1]) / (2.0 * dx);
        let d2 = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (dx * dx);
        (d1, d2)
    }
}

/// Derivatives at every node; endpoints use second-order one-sided stencils.
pub fn derivatives(y: &[f64], dx: f64, scheme: Scheme, d1: &mut [f64], d2: &mut [f64]) {
    let n = y.len();
    assert!(n >= 4, "need at least four nodes");
    interior_all(y, dx, scheme, d1, d2);
    d1[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dx);
    d2[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / (dx * dx);
    d1[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dx);
    d2[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / (dx * dx);
}

/// [`interior`] at every index `1..n-1`, leaving the endpoints untouched.
pub fn interior_all(y: &[f64], dx: f64, scheme: Scheme, d1: &mut [f64], d2: &mut [f64]) {
    let n = y.len();
    let (h1, h2) = (0.5 / dx, 1.0 / (dx * dx));
    let second = |i: usize, d1: &mut [f64], d2: &mut [f64]| {
        d1[i] = (y[i + 1] - y[i - 1]) * h1;
        d2[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) * h2;
    };
    match scheme {
        Scheme::Second => {
            for i in 1..n - 1 {
                second(i, d1, d2);
            }
        }
        Scheme::Fourth => {
            second(1, d1, d2);
            second(n - 2, d1, d2);
            let (q1, q2) = (1.0 / (12.0 * dx), 1.0 / (12.0 * dx * dx));
            for (i, w) in y.windows(5).enumerate() {
                d1[i + 2] = (w[0] - 8.0 * w[1] + 8.0 * w[3] - w[4]) * q1;
                d2[i + 2] = (-w[0] + 16.0 * w[1] - 30.0 * w[2] + 16.0 * w[3] - w[4]) * q2;
            }
        }
    }
}

pub fn derivatives_vec(y: &[f64], dx: f64, scheme: Scheme) -> (Vec<f64>, Vec<f64>) {
    let mut d1 = vec![0.0; y.len()];
    let mut d2 = vec![0.0; y.len()];
    derivatives(y, dx, scheme, &mut d1, &mut d2);
    (d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_err(n: usize, scheme: Scheme) -> f64 {
        let dx = 2.0 / (n - 1) as f64;
        let x: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * dx).collect();
        let y: Vec<f64> = x.iter().map(|t| (2.0 * t).sin()).collect();
        let (d1, d2) = derivatives_vec(&y, dx, scheme);
        (3..n - 3)
            .map(|i| {
                let e1 = (d1[i] - 2.0 * (2.0 * x[i]).cos()).abs();
                let e2 = (d2[i] + 4.0 * (2.0 * x[i]).sin()).abs();
                e1.max(e2)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn orders() {
        for scheme in [Scheme::Second, Scheme::Fourth] {
            let r = max_err(101, scheme) / max_err(201, scheme);
            let order = r.log2();
            assert!((order - scheme.order() as f64).abs() < 0.15, "{scheme:?}: {order}");
        }
    }

    #[test]
    fn endpoints_are_exact_for_quadratics() {
        let y: Vec<f64> = (0..6).map(|i| (i * i) as f64).collect();
        let (d1, d2) = derivatives_vec(&y, 1.0, Scheme::Fourth);
        assert!((d1[0] - 0.0).abs() < 1e-12 && (d1[5] - 10.0).abs() < 1e-12);
        assert!(d2.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }
}
