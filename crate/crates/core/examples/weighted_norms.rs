//! The exponential weights and the weighted norms of the wave itself.

use chemowave::wave::{compute, OrbitOptions};
use chemowave::weights::WeightSpec;
use chemowave::Model;

fn main() -> chemowave::Result<()> {
    let m = Model::reference();
    let ws = WeightSpec::new(&m, 3.0)?;
    println!("   xi      eta_-        eta_+        eta");
    for i in 0..=8 {
        let xi = -2.0 + 0.5 * i as f64;
        println!("{xi:5.2} {:12.6} {:12.6} {:12.6}", ws.eta_minus(xi), ws.eta_plus(xi), ws.eta(xi));
    }
    let wave = compute(&m, &OrbitOptions::default())?.on_uniform_grid(-30.0, 30.0, 6001);
    for w_plus in [m.derived.j_lo, 1.0, 3.0] {
        let t = WeightSpec::new(&m, w_plus)?.table(&wave.xi);
        println!(
            "w_plus = {w_plus:.4}: |u*|_X1 = {:.4e}, |v*|_X2 = {:.4e}, min eta v* = {:.4e}",
            t.norm_x1(&wave.u_star),
            t.norm_x2(&wave.v_star),
            t.min_weighted_v(&wave.v_star)
        );
    }
    Ok(())
}
