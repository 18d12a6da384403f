//! The maps G, G^{-1} and the reduced nonlinearity f for the three
//! diffusion families.

use chemowave::{DiffusionPerturbation, ModelParams, ScalarMapContext};

fn main() {
    let families = [
        ("zero", DiffusionPerturbation::ZERO),
        ("linear 0.5", DiffusionPerturbation::linear(0.5)),
        ("quadratic 0.1", DiffusionPerturbation::quadratic(0.1)),
    ];
    for (name, d) in families {
        let params = ModelParams {
            d,
            ..ModelParams::reference()
        };
        let ctx = ScalarMapContext::new(params);
        let mut worst: f64 = 0.0;
        for k in 0..=600 {
            let y = -50.0 + k as f64 * 0.1;
            let u = ctx.g_inverse(y).expect("G inverse");
            worst = worst.max((ctx.g(u).expect("G") - y).abs());
        }
        println!("{name:<14} max |G(G^-1(y)) - y| on [-50, 10] = {worst:.2e}");
    }
    let ctx = ScalarMapContext::new(ModelParams::reference());
    println!("\n      p        u(p)         f(p)        f'(p)");
    for p in [0.0f64, 1.0, 5.0, 10.0, 15.0, 19.0] {
        println!("{p:7.2} {:11.6} {:12.6} {:12.6}", ctx.u_of_p(p.max(1e-300)), ctx.f(p), ctx.f_prime(p));
    }
}
