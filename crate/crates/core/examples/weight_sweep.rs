//! Growth rates across right weight rates, run concurrently. The worker
//! count honours `CHEMOWAVE_THREADS`.

use chemowave::parallel;
use chemowave::simulator::{run_instability, Grid, InstabilityConfig, SimOptions, Simulator};
use chemowave::spectrum::max_unstable_real_part;
use chemowave::wave::{compute, OrbitOptions};
use chemowave::weights::WeightSpec;
use chemowave::Model;

fn main() -> chemowave::Result<()> {
    let m = Model::reference();
    let wave = compute(&m, &OrbitOptions::default())?;
    let weights = vec![2.7, 2.9, 3.0, 3.2, 3.38];
    let threads = parallel::thread_cap()?;
    let runs = parallel::map(weights.clone(), threads, |w| -> chemowave::Result<Option<f64>> {
        let mut sim = Simulator::new(&wave, Grid::new(-30.0, 40.0, 1024), WeightSpec::new(&m, w)?, SimOptions::default())?;
        Ok(run_instability(&mut sim, &InstabilityConfig::default())?.fit.map(|f| f.rate))
    });
    println!("w_plus   fitted   S2 vertex   ({threads} threads)");
    for (w, r) in weights.iter().zip(runs) {
        let fitted = r?.map_or("none".to_string(), |v| format!("{v:.4}"));
        println!("{w:6.3} {fitted:>8} {:10.4}", max_unstable_real_part(&m.params, *w));
    }
    Ok(())
}
