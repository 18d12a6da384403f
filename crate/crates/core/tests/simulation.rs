use chemowave::simulator::{run_instability, Grid, InstabilityConfig, Perturbation, SimOptions, Simulator};
use chemowave::wave::{compute, OrbitOptions, WaveProfile};
use chemowave::weights::WeightSpec;
use chemowave::Model;

fn wave() -> WaveProfile {
    compute(&Model::reference(), &OrbitOptions::default()).unwrap()
}

fn sim(wave: &WaveProfile) -> Simulator {
    let m = Model::reference();
    Simulator::new(
        wave,
        Grid::new(-30.0, 40.0, 1024),
        WeightSpec::new(&m, 3.0).unwrap(),
        SimOptions::default(),
    )
    .unwrap()
}

fn rate(wave: &WaveProfile, pert: Perturbation) -> f64 {
    let cfg = InstabilityConfig {
        t_final: 6.0,
        perturbation: pert,
        ..InstabilityConfig::default()
    };
    run_instability(&mut sim(wave), &cfg).unwrap().fit.expect("growth window").rate
}

#[test]
fn growth_rate_is_amplitude_independent() {
    let w = wave();
    let small = rate(&w, Perturbation { amplitude: 1e-8, ..Perturbation::default() });
    let large = rate(&w, Perturbation { amplitude: 1e-6, ..Perturbation::default() });
    assert!(((small - large) / large).abs() < 0.05, "{small} vs {large}");
}

#[test]
fn oscillating_perturbation_grows_slower() {
    let w = wave();
    let flat = rate(&w, Perturbation::default());
    let wavy = rate(&w, Perturbation { carrier_h: 1.0, ..Perturbation::default() });
    assert!(flat > wavy, "{flat} vs {wavy}");
}

#[test]
fn small_perturbations_keep_fields_positive() {
    let w = wave();
    let mut s = sim(&w);
    let mut st = s.perturb(&Perturbation { carrier_h: 1.0, ..Perturbation::default() }).unwrap();
    let trace = s.evolve(&mut st, 3.0, 0.5).unwrap();
    assert!(trace.iter().all(|r| r.min_weighted_v > 0.0));
    let (u, p) = s.fields(&st);
    assert!(u.iter().all(|&x| x >= -1e-12));
    assert!(p.iter().all(|&x| x > 0.0));
}
