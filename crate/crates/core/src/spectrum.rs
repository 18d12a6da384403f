//! Right-end asymptotic matrix, dispersion relation and the two spectral
//! parabolas obtained from it.
//!
//! `T_lambda^+` is block structured with diagonal blocks, so its
//! characteristic polynomial is the product of `s^2 - B_j s + A_j` for the
//! species block (`j = 1`) and the chemical block (`j = 2`).

use num_complex::Complex64;

use crate::linearization::a2_plus;
use crate::model::ModelParams;

pub type Matrix4 = [[Complex64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCurvePoint {
    pub h: f64,
    pub lambda: Complex64,
}

/// Coefficients `(A, B)` of the two block quadratics `s^2 - B s + A`.
fn blocks(lambda: Complex64, params: &ModelParams, w: f64) -> [(Complex64, Complex64); 2] {
    let alpha = params.alpha;
    let a2p = a2_plus(params);
    let c = params.c;
    let a1 = w * w - (w * a2p + lambda) / alpha;
    let b1 = Complex64::new(-2.0 * w + a2p / alpha, 0.0);
    let a2 = w * w - w * c + params.gamma - lambda;
    let b2 = Complex64::new(-2.0 * w + c, 0.0);
    [(a1, b1), (a2, b2)]
}

pub fn t_lambda_plus(lambda: Complex64, params: &ModelParams, w_plus: f64) -> Matrix4 {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let [(a1, b1), (a2, b2)] = blocks(lambda, params, w_plus);
    [[z, z, -one, z], [z, z, z, -one], [a1, z, b1, z], [z, a2, z, b2]]
}

/// `det(T_lambda^+ - i h)` from the two closed-form factors.
pub fn dispersion_det(lambda: Complex64, h: f64, params: &ModelParams, w_plus: f64) -> Complex64 {
    let s = Complex64::new(0.0, h);
    blocks(lambda, params, w_plus)
        .iter()
        .map(|&(a, b)| s * s - b * s + a)
        .product()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det4(m: &Matrix4) -> Complex64 {
    let mut a = *m;
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .expect("non-empty range");
        if a[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
        }
    }
    det
}

pub fn shifted(m: &Matrix4, s: Complex64) -> Matrix4 {
    let mut out = *m;
    for (i, row) in out.iter_mut().enumerate() {
        row[i] -= s;
    }
    out
}

fn sample_h(h_range: (f64, f64), n: usize) -> impl Iterator<Item = f64> {
    let (lo, hi) = h_range;
    (0..n).map(move |i| {
        if n == 1 {
            lo
        } else if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    })
}

/// `Re = alpha(-h^2 + w^2 - w a2+/alpha)`, `Im = (2 alpha w - a2+) h`.
pub fn curve_s1(params: &ModelParams, w_plus: f64, h_range: (f64, f64), n: usize) -> Vec<SpectralCurvePoint> {
    let alpha = params.alpha;
    let a2p = a2_plus(params);
    let w = w_plus;
    sample_h(h_range, n)
        .map(|h| SpectralCurvePoint {
            h,
            lambda: Complex64::new(
                alpha * (-h * h + w * w - w * a2p / alpha),
                (2.0 * alpha * w - a2p) * h,
            ),
        })
        .collect()
}

/// `Re = -h^2 + w^2 - w c + gamma`, `Im = (2 w - c) h`.
pub fn curve_s2(params: &ModelParams, w_plus: f64, h_range: (f64, f64), n: usize) -> Vec<SpectralCurvePoint> {
    let w = w_plus;
    sample_h(h_range, n)
        .map(|h| SpectralCurvePoint {
            h,
            lambda: Complex64::new(-h * h + w * w - w * params.c + params.gamma, (2.0 * w - params.c) * h),
        })
        .collect()
}

/// Vertex of the second parabola, `w^2 - w c + gamma`.
pub fn max_unstable_real_part(params: &ModelParams, w_plus: f64) -> f64 {
    w_plus * w_plus - w_plus * params.c + params.gamma
}

/// Vertex of the first parabola, `w^2 - w a2+ / alpha`, scaled by `alpha`.
pub fn s1_vertex(params: &ModelParams, w_plus: f64) -> f64 {
    params.alpha * w_plus * (w_plus - a2_plus(params) / params.alpha)
}

/// Eigenvalues of a matrix with the block layout of `T_lambda^+`.
pub fn block_eigenvalues(t: &Matrix4) -> [Complex64; 4] {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for j in 0..2 {
        let a = t[2 + j][j];
        let b = t[2 + j][2 + j];
        let disc = (b * b - 4.0 * a).sqrt();
        out[2 * j] = 0.5 * (b + disc);
        out[2 * j + 1] = 0.5 * (b - disc);
    }
    out
}

pub fn is_hyperbolic(t: &Matrix4, tol: f64) -> bool {
    block_eigenvalues(t).iter().all(|s| s.re.abs() > tol)
}

pub const DEFAULT_HYPERBOLIC_TOL: f64 = 1e-9;
