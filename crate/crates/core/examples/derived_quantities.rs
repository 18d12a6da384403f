//! Derived constants, weight windows and admissibility for a parameter set.
//!
//! Usage: `cargo run --example derived_quantities -- [alpha chi gamma l c]`

use chemowave::model::{check_r1, check_r2, validate};
use chemowave::{Model, ModelParams};

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let params = match args.as_slice() {
        [alpha, chi, gamma, l, c] => ModelParams {
            alpha: *alpha,
            chi: *chi,
            gamma: *gamma,
            l: *l,
            c: *c,
            d: Default::default(),
        },
        _ => ModelParams::reference(),
    };
    let violations = validate(&params);
    if !violations.is_empty() {
        for v in violations {
            eprintln!("{v}");
        }
        std::process::exit(1);
    }
    let m = Model::new(params).expect("validated");
    let d = m.derived;
    println!("{params:?}");
    println!("a = {:.10}  mu = {:.10}  nu = {:.10}", d.a, d.mu, d.nu);
    println!("p0 = {:.10}  u_minus = {:.10}", d.p0, d.u_minus);
    println!("kappa_+ = {:.10}  kappa_- = {:.10}", d.kappa_plus, d.kappa_minus);
    println!("f'(p0) = {:.10}  unstable eigenvalue = {:.10}", d.f_prime_p0, d.lambda_unstable);
    println!("J   = [{:.10}, {:.10}]  (nonempty: {})", d.j_lo, d.j_hi, check_r1(&params));
    if d.ju_nonempty() {
        println!("J_u = [{:.10}, {:.10}]", d.ju_lo, d.j_hi);
        let mid = 0.5 * (d.ju_lo + d.j_hi);
        println!("w_plus = {mid:.4} admits instability: {}", check_r2(&params, mid));
    } else {
        println!("J_u is empty");
    }
}
