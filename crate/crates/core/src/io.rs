//! CSV tables and minimal SVG line plots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Full-precision real formatting used in every CSV.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders equal-length columns as CSV with a one-line header.
pub fn csv_string(header: &[&str], columns: &[&[f64]]) -> Result<String> {
    if header.len() != columns.len() {
        return Err(Error::InvalidOption {
            detail: format!("{} header names for {} columns", header.len(), columns.len()),
        });
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidOption {
            detail: "CSV columns differ in length".into(),
        });
    }
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| fmt_real(c[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    fs::write(path, csv_string(header, columns)?)?;
    Ok(())
}

/// Parses a CSV produced by [`csv_string`] back into header and columns.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Io("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (ln, line) in lines.enumerate() {
        let vals: Vec<&str> = line.split(',').collect();
        if vals.len() != header.len() {
            return Err(Error::Io(format!("row {} has {} fields", ln + 2, vals.len())));
        }
        for (c, v) in cols.iter_mut().zip(vals) {
            c.push(v.parse().map_err(|e| Error::Io(format!("row {}: {e}", ln + 2)))?);
        }
    }
    Ok((header, cols))
}

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// A polyline plot with axes and a legend. With `log_y`, non-positive
/// samples are dropped and the axis is `log10 y`.
pub fn svg_plot(title: &str, x_label: &str, series: &[Series<'_>], log_y: bool) -> String {
    let (w, h, m) = (640.0, 400.0, 50.0);
    let tr = |v: f64| if log_y { v.log10() } else { v };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.x.iter()
                .zip(s.y)
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_y || **y > 0.0))
                .map(|(&x, &y)| (x, tr(y)))
                .collect()
        })
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{b} H{r}" stroke="black" fill="none"/>"#,
        b = h - m,
        r = w - m
    );
    let ylab = if log_y { "log10" } else { "" };
    let _ = writeln!(s, r#"<text x="{m}" y="{}" font-size="11">{x0:.3}</text>"#, h - m + 15.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{x1:.3}</text>"#, w - m, h - m + 15.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{x_label}</text>"#, w / 2.0, h - 12.0);
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="11">{ylab} {y0:.3}</text>"#, h - m);
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="11">{ylab} {y1:.3}</text>"#, m + 4.0);
    for (k, (p, ser)) in pts.iter().zip(series).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let coords: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            w - m - 120.0,
            m + 14.0 * (k as f64 + 1.0),
            ser.label
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let a = [0.1, -1e-300, 19.0, std::f64::consts::PI];
        let b = [1.0, 2.0, 3.0, 4.0];
        let text = csv_string(&["a", "b"], &[&a, &b]).unwrap();
        assert!(text.starts_with("a,b\n"));
        let (h, cols) = read_csv(&text).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(cols[0], a.to_vec());
        assert_eq!(cols[1], b.to_vec());
    }

    #[test]
    fn csv_shape_errors() {
        assert!(csv_string(&["a"], &[&[1.0], &[2.0]]).is_err());
        assert!(csv_string(&["a", "b"], &[&[1.0], &[2.0, 3.0]]).is_err());
    }

    #[test]
    fn svg_is_well_formed() {
        let x = [0.0, 1.0, 2.0];
        let y = [1.0, 10.0, 0.0];
        let svg = svg_plot("t", "x", &[Series { label: "y", x: &x, y: &y }], true);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
