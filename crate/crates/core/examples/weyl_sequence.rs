//! Windowed Fourier modes on the right tail as approximate eigenfunctions
//! of the weighted linearisation.

use chemowave::linearization::{assemble_conjugated, coefficients, weyl_residual};
use chemowave::wave::{compute, OrbitOptions};
use chemowave::weights::WeightSpec;
use chemowave::Model;
use num_complex::Complex64;

fn main() -> chemowave::Result<()> {
    let m = Model::reference();
    let wave = compute(&m, &OrbitOptions::default())?.on_uniform_grid(-30.0, 40.0, 4096);
    let w_plus = 3.0;
    let op = assemble_conjugated(&coefficients(&wave, None)?, &WeightSpec::new(&m, w_plus)?)?;
    for h in [0.0, 0.5, 1.0] {
        let p = m.params;
        let lambda = Complex64::new(-h * h + w_plus * w_plus - w_plus * p.c + p.gamma, (p.c - 2.0 * w_plus) * h);
        print!("h = {h:.1}, lambda = {lambda:.3}:");
        for width in [4.0, 8.0, 16.0] {
            print!("  width {width:>4}: {:.3e}", weyl_residual(&op, lambda, h, (20.0, width))?);
        }
        println!();
    }
    Ok(())
}
