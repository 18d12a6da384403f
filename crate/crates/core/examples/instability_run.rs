//! Perturbs the wave and fits the exponential growth of the weighted norm.
//!
//! Usage: `cargo run --release --example instability_run -- [n] [w_plus]`

use chemowave::simulator::{run_instability, Grid, InstabilityConfig, SimOptions, Simulator};
use chemowave::wave::{compute, OrbitOptions};
use chemowave::weights::WeightSpec;
use chemowave::Model;

fn main() -> chemowave::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2048);
    let w_plus: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3.0);
    let m = Model::reference();
    let wave = compute(&m, &OrbitOptions::default())?;
    let mut sim = Simulator::new(&wave, Grid::new(-30.0, 40.0, n), WeightSpec::new(&m, w_plus)?, SimOptions::default())?;
    let res = run_instability(&mut sim, &InstabilityConfig::default())?;
    for s in res.trace.iter().step_by(20) {
        println!("t = {:5.2}  norm_D = {:.4e}  min eta v = {:.4e}", s.t, s.norm_d, s.min_weighted_v);
    }
    match res.fit {
        Some(f) => println!("fitted rate {:.4} ± {:.1e}, predicted {}", f.rate, f.rate_stderr, res.predicted),
        None => println!("no growth window, predicted {}", res.predicted),
    }
    Ok(())
}
