//! Iterates the time-one map of the perturbed flow until the weighted norm
//! of the perturbation reaches epsilon0.

use chemowave::simulator::{time_one_map_escape, EscapeConfig, Grid, Perturbation, SimOptions, Simulator};
use chemowave::wave::{compute, OrbitOptions};
use chemowave::weights::WeightSpec;
use chemowave::Model;

fn main() -> chemowave::Result<()> {
    let m = Model::reference();
    let wave = compute(&m, &OrbitOptions::default())?;
    for w_plus in [3.0, 0.5] {
        let ws = WeightSpec::new(&m, w_plus)?;
        let mut sim = Simulator::new(&wave, Grid::new(-30.0, 40.0, 1024), ws, SimOptions::default())?;
        let cfg = EscapeConfig {
            n_max: 12,
            ..EscapeConfig::default()
        };
        let res = time_one_map_escape(&mut sim, &Perturbation::default(), &cfg)?;
        println!("w_plus = {w_plus}: escape at {:?}", res.escape_n);
        for (n, v) in res.norms.iter().enumerate() {
            println!("  n = {n:2}  norm_D = {v:.4e}");
        }
    }
    Ok(())
}
