//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use chemowave::fd::Scheme;
use chemowave::linearization::{assemble_conjugated, coefficients, weyl_residual};
use chemowave::model::{derive, Model, ModelParams};
use chemowave::parallel;
use chemowave::simulator::{
    run_instability, time_one_map_escape, BaseMode, EscapeConfig, Grid, InstabilityConfig, Perturbation,
    SimOptions, Simulator,
};
use chemowave::spectrum::{
    curve_s1, curve_s2, det4, dispersion_det, max_unstable_real_part, s1_vertex, shifted, t_lambda_plus,
};
use chemowave::wave::{compute, measure_rates, residual, OrbitOptions, WaveProfile};
use chemowave::weights::WeightSpec;
use chemowave::{DiffusionPerturbation, ScalarMapContext};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const C1_ABS: f64 = 1e-12;
const C1_LITERAL: f64 = 5e-8;
const C2_ROUNDTRIP: f64 = 1e-12;
const C2_IDENTITY: f64 = 1e-12;
const C2_POINT: f64 = 1e-10;
const C3_R1: f64 = 1e-6;
const C3_R2: f64 = 1e-5;
const C3_EPS_HALVING: f64 = 1e-6;
const C4_RATE: f64 = 1e-2;
const C4_KAPPA: f64 = 1e-3;
const C5_REL: f64 = 1e-10;
const C5_VERTEX: f64 = 1e-12;
const C6_RATIO: f64 = 0.6;
const C7_DRIFT: f64 = 1e-3;
const C7_ORDER: f64 = 2.0;
const C8_BAND: (f64, f64) = (0.6, 1.5);
const C9_ESCAPE_N: usize = 12;
const C9_NEG_N: usize = 30;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let out = f();
    let el = t0.elapsed();
    let in_budget = el <= budget;
    let pass = out.pass && in_budget;
    println!(
        "criterion {id}: {} | {} | runtime {:.3} s (budget {:.3} s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        el.as_secs_f64(),
        budget.as_secs_f64()
    );
    pass
}

fn reference_wave() -> WaveProfile {
    compute(&Model::reference(), &OrbitOptions::default()).expect("reference wave")
}

fn c1() -> Outcome {
    let p = ModelParams::reference();
    let dq = derive(&p).expect("admissible");
    let (alpha, chi, gamma, l, c) = (p.alpha, p.chi, p.gamma, p.l, p.c);
    let a = c / chi;
    let mu = 2.0 * a + c;
    let nu = a * a + a * c + gamma;
    let kappa_plus = (-mu + (mu * mu - 4.0 * nu).sqrt()) / 2.0;
    let u_minus = nu / l;
    let p0 = u_minus.powf(alpha / chi);
    let j = (-(kappa_plus + a), -chi * kappa_plus / alpha);
    let ju_lo = (c + (c * c - 4.0 * gamma).sqrt()) / 2.0;
    let a2p = c - chi * (kappa_plus + a);
    let checks = [
        ("kappa_+", dq.kappa_plus, kappa_plus),
        ("p0", dq.p0, p0),
        ("u_-", dq.u_minus, u_minus),
        ("J_lo", dq.j_lo, j.0),
        ("J_hi", dq.j_hi, j.1),
        ("Ju_lo", dq.ju_lo, ju_lo),
        ("a2+", chemowave::linearization::a2_plus(&p), a2p),
    ];
    let worst = checks.iter().map(|(_, x, y)| (x - y).abs()).fold(0.0, f64::max);
    let literals = [
        (dq.kappa_plus, -4.5 + 5f64.sqrt() / 2.0),
        (dq.u_minus, 19.0),
        (dq.j_lo, 0.3819660),
        (dq.j_hi, 3.3819660),
        (dq.ju_lo, 2.6180340),
        (a2p, 3.3819660),
    ];
    let lit = literals.iter().map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Outcome {
        pass: worst <= C1_ABS && lit <= C1_LITERAL && (dq.p0 - 19.0).abs() <= C1_ABS,
        detail: format!(
            "max |derived - oracle| = {worst:.1e}; max |derived - 7-digit reference values| = {lit:.1e}; p0 = {:.15} (equals u_- = nu/l for d = 0)",
            dq.p0
        ),
    }
}

fn c2() -> Outcome {
    let families = [
        DiffusionPerturbation::ZERO,
        DiffusionPerturbation::linear(0.5),
        DiffusionPerturbation::quadratic(0.1),
    ];
    let mut roundtrip: f64 = 0.0;
    for d in families {
        let ctx = ScalarMapContext::new(ModelParams {
            d,
            ..ModelParams::reference()
        });
        for k in 0..=6000 {
            let y = -50.0 + k as f64 * 0.01;
            let u = ctx.g_inverse(y).expect("G inverse");
            roundtrip = roundtrip.max((ctx.g(u).expect("G") - y).abs());
        }
    }
    let m = Model::reference();
    let ctx = m.maps;
    let nu = m.derived.nu;
    let mut identity: f64 = 0.0;
    for k in 1..=1900 {
        let p = k as f64 * 0.01;
        identity = identity.max((ctx.f(p) + ctx.g_remainder(p) - nu * p).abs() / (nu * p).max(1.0));
    }
    let fp0 = (ctx.f_prime(0.0) - nu).abs();
    let fpp = ctx.f(m.derived.p0).abs();
    let fd_err = |h: f64| {
        let y = -0.7;
        let fd = (ctx.g_inverse(y + h).unwrap() - ctx.g_inverse(y - h).unwrap()) / (2.0 * h);
        (fd - ctx.g_inverse_prime(y).unwrap()).abs()
    };
    let order = (fd_err(1e-2) / fd_err(5e-3)).log2();
    Outcome {
        pass: roundtrip <= C2_ROUNDTRIP
            && identity <= C2_IDENTITY
            && fp0 <= C2_POINT
            && fpp <= C2_POINT
            && (order - 2.0).abs() < 0.2,
        detail: format!(
            "roundtrip {roundtrip:.1e}; |f+g-nu p| rel {identity:.1e}; |f'(0)-nu| {fp0:.1e}; |f(p0)| {fpp:.1e}; FD order of (G^-1)' {order:.2}"
        ),
    }
}

fn c3() -> Outcome {
    let m = Model::reference();
    let a = reference_wave();
    let grid = a.on_uniform_grid(-30.0, 30.0, 1 << 14);
    let (r1, r2) = residual(&grid);
    let inv = grid.check_invariants();
    let b = compute(
        &m,
        &OrbitOptions {
            eps0: Some(0.5e-8 * m.derived.p0),
            ..Default::default()
        },
    )
    .expect("halved eps0 wave")
    .on_uniform_grid(-30.0, 30.0, 1 << 14);
    let diff = (0..grid.len())
        .map(|i| {
            (grid.p_star[i] - b.p_star[i])
                .abs()
                .max((grid.u_star[i] - b.u_star[i]).abs())
                .max((grid.v_star[i] - b.v_star[i]).abs())
        })
        .fold(0.0, f64::max);
    Outcome {
        pass: r1 <= C3_R1 && r2 <= C3_R2 && inv.is_ok() && diff <= C3_EPS_HALVING,
        detail: format!(
            "r1 = {r1:.2e}, r2 = {r2:.2e}, invariants {}, eps0-halving sup diff {diff:.1e}",
            if inv.is_ok() { "hold" } else { "violated" }
        ),
    }
}

fn c4() -> Outcome {
    let w = reference_wave();
    let rates = measure_rates(&w).expect("tail fits");
    let worst = rates.iter().map(|r| r.error()).fold(0.0, f64::max);
    let n = w.len() - 1;
    let kp = w.model().derived.kappa_plus;
    let kerr = (w.q_star[n] / w.p_star[n] - kp).abs();
    Outcome {
        pass: rates.len() == 8 && worst <= C4_RATE && kerr <= C4_KAPPA,
        detail: format!("{} tail fits, max rate error {worst:.1e}; |q/p(end) - kappa_+| = {kerr:.1e}", rates.len()),
    }
}

fn admissible_sets(rng: &mut ChaCha8Rng, count: usize) -> Vec<ModelParams> {
    let mut out = Vec::new();
    while out.len() < count {
        let gamma: f64 = rng.gen_range(0.2..3.0);
        let p = ModelParams {
            alpha: rng.gen_range(0.2..3.0),
            chi: rng.gen_range(0.2..3.0),
            gamma,
            l: rng.gen_range(0.2..3.0),
            c: rng.gen_range(1.01..3.0) * 2.0 * gamma.sqrt(),
            d: DiffusionPerturbation::ZERO,
        };
        if let Ok(dq) = derive(&p) {
            if dq.j_hi > dq.j_lo {
                out.push(p);
            }
        }
    }
    out
}

fn c5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20261014);
    let p = ModelParams::reference();
    let dq = derive(&p).unwrap();
    let mut det_rel: f64 = 0.0;
    for _ in 0..1000 {
        let lam = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let h = rng.gen_range(-3.0..3.0);
        let w = rng.gen_range(dq.j_lo..dq.j_hi);
        let direct = det4(&shifted(&t_lambda_plus(lam, &p, w), Complex64::new(0.0, h)));
        let fact = dispersion_det(lam, h, &p, w);
        det_rel = det_rel.max((direct - fact).norm() / fact.norm().max(direct.norm()));
    }
    let sets = admissible_sets(&mut rng, 50);
    let mut root: f64 = 0.0;
    let mut s1max = f64::NEG_INFINITY;
    for q in &sets {
        let d = derive(q).unwrap();
        for _ in 0..200 {
            let w = rng.gen_range(d.j_lo..=d.j_hi);
            s1max = s1max.max(s1_vertex(q, w));
        }
        let w = 0.5 * (d.j_lo + d.j_hi);
        for pt in curve_s1(q, w, (-3.0, 3.0), 61).into_iter().chain(curve_s2(q, w, (-3.0, 3.0), 61)) {
            let scale = 1.0 + pt.lambda.norm() + pt.h * pt.h;
            root = root.max(dispersion_det(pt.lambda, pt.h, q, w).norm() / (scale * scale));
        }
    }
    let v3 = (max_unstable_real_part(&p, 3.0) - 1.0).abs();
    let v05 = (max_unstable_real_part(&p, 0.5) + 0.25).abs();
    Outcome {
        pass: det_rel <= C5_REL && root <= C5_REL && v3 <= C5_VERTEX && v05 <= C5_VERTEX && s1max <= C5_VERTEX,
        detail: format!(
            "factorised vs direct rel {det_rel:.1e}; curve-point |det| (scaled) {root:.1e}; S2 vertex errors {v3:.1e}, {v05:.1e}; max S1 vertex over 50x200 {s1max:.1e}"
        ),
    }
}

fn c6() -> Outcome {
    let m = Model::reference();
    let wave = reference_wave().on_uniform_grid(-30.0, 40.0, 4096);
    let op = assemble_conjugated(
        &coefficients(&wave, None).expect("coefficients"),
        &WeightSpec::new(&m, 3.0).unwrap(),
    )
    .expect("operator");
    let r: Vec<f64> = [4.0, 8.0, 16.0]
        .iter()
        .map(|&w| weyl_residual(&op, Complex64::new(1.0, 0.0), 0.0, (20.0, w)).expect("window"))
        .collect();
    let (q1, q2) = (r[1] / r[0], r[2] / r[1]);
    Outcome {
        pass: q1 <= C6_RATIO && q2 <= C6_RATIO,
        detail: format!(
            "residuals {:.3}, {:.3}, {:.3} at widths 4, 8, 16; ratios {q1:.3}, {q2:.3}",
            r[0], r[1], r[2]
        ),
    }
}

fn drift(wave: &WaveProfile, n: usize) -> (f64, f64) {
    let m = *wave.model();
    let opts = SimOptions {
        base_mode: BaseMode::Discrete,
        scheme: Scheme::Fourth,
        ..SimOptions::default()
    };
    let grid = Grid::new(-30.0, 30.0, n);
    let mut sim = Simulator::new(wave, grid, WeightSpec::new(&m, m.derived.j_lo).unwrap(), opts).unwrap();
    let mut st = sim.wave_state();
    sim.advance(&mut st, 1.0).expect("drift run");
    let low = sim.norms(&st).norm_d;
    let mut heavy = Simulator::new(wave, grid, WeightSpec::new(&m, 3.0).unwrap(), opts).unwrap();
    (low, heavy.norms(&st).norm_d)
}

fn c7() -> Outcome {
    let wave = reference_wave();
    let (fine, coarse) = (8192, 4096);
    let runs = parallel::map(vec![fine, coarse], parallel::thread_cap().unwrap_or(1), |n| drift(&wave, n));
    let (df, dw3) = runs[0];
    let dc = runs[1].0;
    let dx_ratio = (fine - 1) as f64 / (coarse - 1) as f64;
    let order = (dc / df).ln() / dx_ratio.ln();
    Outcome {
        pass: df <= C7_DRIFT && order >= C7_ORDER,
        detail: format!(
            "drift at t = 1 in the w_plus = J_lo norm: {df:.2e} (N = 8192), {dc:.2e} (N = 4096), observed order {order:.2}; same state in the w_plus = 3 norm: {dw3:.1e}"
        ),
    }
}

fn instability(wave: &WaveProfile, n: usize, scheme: Scheme, w_plus: f64) -> Option<f64> {
    let m = *wave.model();
    let opts = SimOptions {
        scheme,
        ..SimOptions::default()
    };
    let mut sim = Simulator::new(wave, Grid::new(-30.0, 40.0, n), WeightSpec::new(&m, w_plus).unwrap(), opts).unwrap();
    run_instability(&mut sim, &InstabilityConfig::default())
        .expect("no guard fires")
        .fit
        .map(|f| f.rate)
}

fn c8() -> Outcome {
    let wave = reference_wave();
    let jobs = vec![
        (8192, Scheme::Second, 3.0),
        (4096, Scheme::Second, 3.0),
        (8192, Scheme::Second, 0.5),
        (8192, Scheme::Fourth, 3.0),
        (4096, Scheme::Fourth, 3.0),
    ];
    let r = parallel::map(jobs, parallel::thread_cap().unwrap_or(1), |(n, s, w)| instability(&wave, n, s, w));
    let (fine, coarse, neg) = (r[0], r[1], r[2]);
    let pass = match (fine, coarse) {
        (Some(f), Some(c)) => f >= C8_BAND.0 && f <= C8_BAND.1 && (f - 1.0).abs() < (c - 1.0).abs() && neg.is_none(),
        _ => false,
    };
    let fmt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.6}"));
    Outcome {
        pass,
        detail: format!(
            "second-order stencil: rate {} (N = 8192) vs {} (N = 4096), predicted 1.0; w_plus = 0.5 control: growth window {}; fourth-order stencil for reference: {} (N = 8192), {} (N = 4096)",
            fmt(fine),
            fmt(coarse),
            if neg.is_none() { "absent" } else { "found" },
            fmt(r[3]),
            fmt(r[4])
        ),
    }
}

fn c9() -> Outcome {
    let wave = reference_wave();
    let m = *wave.model();
    let run = |w_plus: f64| {
        let mut sim =
            Simulator::new(&wave, Grid::default(), WeightSpec::new(&m, w_plus).unwrap(), SimOptions::default()).unwrap();
        time_one_map_escape(&mut sim, &Perturbation::default(), &EscapeConfig::default()).expect("no guard fires")
    };
    let r = parallel::map(vec![3.0, 0.5], parallel::thread_cap().unwrap_or(1), run);
    let (pos, neg) = (&r[0], &r[1]);
    let pass = matches!(pos.escape_n, Some(n) if n <= C9_ESCAPE_N) && neg.escape_n.is_none() && neg.norms.len() == C9_NEG_N + 1;
    Outcome {
        pass,
        detail: format!(
            "w_plus = 3: escape at n = {:?} (norm {:.3e}); w_plus = 0.5: escape {:?} after {} iterations, max norm {:.3e}",
            pos.escape_n,
            pos.norms.last().unwrap(),
            neg.escape_n,
            neg.norms.len() - 1,
            neg.norms.iter().cloned().fold(0.0, f64::max)
        ),
    }
}

fn main() {
    let s = Duration::from_secs_f64;
    let results = [
        report(1, s(1e-3), c1),
        report(2, s(1.0), c2),
        report(3, s(10.0), c3),
        report(4, s(5.0), c4),
        report(5, s(5.0), c5),
        report(6, s(30.0), c6),
        report(7, s(120.0), c7),
        report(8, s(600.0), c8),
        report(9, s(900.0), c9),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
