//! The two spectral parabolas for a sweep of right weight rates.

use chemowave::spectrum::{curve_s2, dispersion_det, max_unstable_real_part, s1_vertex};
use chemowave::Model;

fn main() {
    let m = Model::reference();
    let d = m.derived;
    println!("  w_plus    max Re S1    max Re S2");
    for k in 0..=10 {
        let w = d.j_lo + (d.j_hi - d.j_lo) * k as f64 / 10.0;
        println!("{w:8.4} {:12.6} {:12.6}", s1_vertex(&m.params, w), max_unstable_real_part(&m.params, w));
    }
    let worst = curve_s2(&m.params, 3.0, (-3.0, 3.0), 61)
        .iter()
        .map(|pt| dispersion_det(pt.lambda, pt.h, &m.params, 3.0).norm())
        .fold(0.0f64, f64::max);
    println!("\nlargest |det| on sampled S2 points at w_plus = 3: {worst:.2e}");
}
