//! Shoots the heteroclinic orbit, assembles the wave and reports residuals,
//! tail rates and a coarse table of the profile.

use chemowave::wave::{compute, measure_rates, residual, OrbitOptions};
use chemowave::Model;

fn main() -> chemowave::Result<()> {
    let m = Model::reference();
    let profile = compute(&m, &OrbitOptions::default())?;
    profile.check_invariants()?;
    let fine = profile.on_uniform_grid(-30.0, 30.0, 1 << 14);
    let (r1, r2) = residual(&fine);
    println!("residuals on [-30, 30] with 2^14 points: r1 = {r1:.2e}, r2 = {r2:.2e}");
    for f in measure_rates(&profile)? {
        println!("{:?} {:<15} fitted {:+.8} target {:+.8}", f.tail, f.quantity, f.fitted, f.target);
    }
    println!("\n   xi        u            v            p");
    for i in 0..=12 {
        let xi = -30.0 + 5.0 * i as f64;
        let w = profile.point(xi);
        println!("{xi:6.1} {:12.6e} {:12.6e} {:12.6e}", w.u, w.v, w.p);
    }
    Ok(())
}
