//! Exponential growth-rate fits over a norm history.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub rate: f64,
    /// Standard error of the fitted slope.
    pub rate_stderr: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub points: usize,
}

/// Least-squares slope of `ln y` against `t` and its standard error.
pub fn log_slope(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mt = t.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in t.iter().zip(&ly) {
        sxy += (a - mt) * (b - my);
        sxx += (a - mt) * (a - mt);
    }
    let slope = sxy / sxx;
    if t.len() < 3 {
        return (slope, f64::NAN);
    }
    let rss: f64 = t
        .iter()
        .zip(&ly)
        .map(|(a, b)| {
            let r = b - my - slope * (a - mt);
            r * r
        })
        .sum();
    (slope, (rss / (n - 2.0) / sxx).sqrt())
}

/// Fits `ln norm` on the first contiguous stretch with `lo <= norm <= hi`.
/// Returns `None` when fewer than three samples qualify.
pub fn fit_growth(t: &[f64], norm: &[f64], lo: f64, hi: f64) -> Option<GrowthFit> {
    let start = norm.iter().position(|&v| v >= lo)?;
    let end = norm[start..]
        .iter()
        .position(|&v| v > hi)
        .map_or(norm.len(), |k| start + k);
    if end - start < 3 {
        return None;
    }
    let (rate, rate_stderr) = log_slope(&t[start..end], &norm[start..end]);
    Some(GrowthFit {
        rate,
        rate_stderr,
        t_start: t[start],
        t_end: t[end - 1],
        points: end - start,
    })
}
