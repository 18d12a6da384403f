//! Subcommands behind the `chemowave` binary.
//!
//! Exit codes: 0 success, 1 configuration problem, 2 no result (shooting
//! failure, failed checks, no growth window, no escape), 3 guard violation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io::{svg_plot, write_csv, Series};
use crate::model::{check_r2, Model};
use crate::simulator::{run_instability, time_one_map_escape, Simulator};
use crate::spectrum::{curve_s1, curve_s2, max_unstable_real_part, s1_vertex, SpectralCurvePoint};
use crate::wave::{compute, measure_rates, residual, Tail};
use crate::parallel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NO_RESULT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "chemowave", version, about = "Travelling waves and their instability in a singular chemotaxis model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration; defaults apply to every omitted key.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Validate parameters and report derived constants and weight windows.
    Check,
    /// Compute the wave, write wave.csv, report residuals and tail rates.
    Wave,
    /// Sample the spectral curves for the configured weight.
    Spectrum,
    /// Perturb the wave, evolve it and fit the growth rate.
    Simulate,
    /// Iterate the time-one map until the perturbation escapes.
    Escape,
}

/// Maps an error to the exit-code contract.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SingularityGuard { .. } | Error::CflViolated { .. } => EXIT_GUARD,
        Error::NewtonNoConvergence { .. }
        | Error::DegenerateSaddle { .. }
        | Error::SpeedBelowMinimum { .. }
        | Error::SpanExceeded { .. }
        | Error::MonotonicityViolated { .. }
        | Error::StepSizeUnderflow { .. }
        | Error::InsufficientTail { .. } => EXIT_NO_RESULT,
        _ => EXIT_CONFIG,
    }
}

/// Text report and exit code of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<String>,
    pub code: i32,
}

impl Report {
    fn new() -> Self {
        Self {
            lines: Vec::new(),
            code: EXIT_OK,
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }
}

/// Loads the config and applies the command-line overrides.
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if cli.svg {
        cfg.output.emit_svg = true;
    }
    Ok(cfg)
}

/// Runs a parsed command line, writing the report to `out` and errors to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = parallel::thread_cap()
        .and_then(|_| effective_config(cli))
        .and_then(|cfg| execute(cli.command, &cfg));
    match result {
        Ok(report) => {
            for l in &report.lines {
                let _ = writeln!(out, "{l}");
            }
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Report> {
    match command {
        Command::Check => cmd_check(cfg),
        Command::Wave => cmd_wave(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Escape => cmd_escape(cfg),
    }
}

fn prepare_out(cfg: &RunConfig) -> Result<&Path> {
    let dir = cfg.output.dir.as_path();
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.json"), cfg.to_json() + "\n")?;
    Ok(dir)
}

fn model_and_options(cfg: &RunConfig) -> Result<Model> {
    let m = cfg.model()?;
    cfg.validate_options(&m)?;
    Ok(m)
}

pub fn cmd_check(cfg: &RunConfig) -> Result<Report> {
    let m = model_and_options(cfg)?;
    let d = &m.derived;
    let mut r = Report::new();
    r.line("parameters: admissible");
    r.line(format!(
        "a = {:?}, mu = {:?}, nu = {:?}, p0 = {:?}, u_minus = {:?}",
        d.a, d.mu, d.nu, d.p0, d.u_minus
    ));
    r.line(format!(
        "kappa_plus = {:?}, kappa_minus = {:?}, f'(p0) = {:?}, lambda_u = {:?}",
        d.kappa_plus, d.kappa_minus, d.f_prime_p0, d.lambda_unstable
    ));
    r.line(format!("J = [{:?}, {:?}]", d.j_lo, d.j_hi));
    if d.ju_nonempty() {
        r.line(format!("J_u = [{:?}, {:?}]", d.ju_lo, d.j_hi));
    } else {
        r.line("J_u is empty");
    }
    let w = cfg.weight_spec(&m)?.w_plus;
    r.line(format!("w_plus = {w:?} lies in J"));
    r.line(format!("max Re on S2 = {:?}", max_unstable_real_part(&m.params, w)));
    if check_r2(&m.params, w) {
        r.line("instability condition holds: this weight admits unstable spectrum");
    } else {
        r.line("instability condition fails: S2 stays in the closed left half-plane for this weight");
    }
    Ok(r)
}

pub fn cmd_wave(cfg: &RunConfig) -> Result<Report> {
    let m = model_and_options(cfg)?;
    let profile = compute(&m, &cfg.wave)?;
    profile.check_invariants()?;
    let (r1, r2) = residual(&profile);
    let rates = measure_rates(&profile)?;
    let dir = prepare_out(cfg)?;
    write_csv(
        &dir.join("wave.csv"),
        &["xi", "p", "q", "u", "v", "u_prime", "v_prime", "v_double_prime"],
        &[
            &profile.xi,
            &profile.p_star,
            &profile.q_star,
            &profile.u_star,
            &profile.v_star,
            &profile.u_prime,
            &profile.v_prime,
            &profile.v_double_prime,
        ],
    )?;
    if cfg.output.emit_svg {
        let svg = svg_plot(
            "wave profile",
            "xi",
            &[
                Series { label: "u", x: &profile.xi, y: &profile.u_star },
                Series { label: "v", x: &profile.xi, y: &profile.v_star },
            ],
            false,
        );
        fs::write(dir.join("wave.svg"), svg)?;
    }
    let chk = cfg.wave_checks;
    let mut r = Report::new();
    r.line(format!(
        "profile on [{:.3}, {:.3}] with {} points",
        profile.xi[0],
        profile.xi[profile.len() - 1],
        profile.len()
    ));
    r.line(format!("residuals: r1 = {r1:.3e} (max {:.1e}), r2 = {r2:.3e} (max {:.1e})", chk.r1_max, chk.r2_max));
    r.line(format!(
        "S1_hat = {:.6e}, S2_hat = {:.6e}, S3_hat = {:.6e}",
        profile.s1_hat, profile.s2_hat, profile.s3_hat
    ));
    r.line("tail   quantity          fitted       target      |error|");
    let mut ok = r1 <= chk.r1_max && r2 <= chk.r2_max;
    for f in &rates {
        let tail = match f.tail {
            Tail::Left => "left ",
            Tail::Right => "right",
        };
        r.line(format!(
            "{tail}  {:<14} {:>12.7} {:>12.7} {:>10.2e}",
            f.quantity,
            f.fitted,
            f.target,
            f.error()
        ));
        ok &= f.error() <= chk.rate_tol;
    }
    let n = profile.len() - 1;
    r.line(format!(
        "q/p at right end = {:.7}, kappa_plus = {:.7}",
        profile.q_star[n] / profile.p_star[n],
        m.derived.kappa_plus
    ));
    if !ok {
        r.line("wave checks failed");
        r.code = EXIT_NO_RESULT;
    }
    Ok(r)
}

fn vertex_note(v: f64) -> &'static str {
    if v > 0.0 {
        "unstable: S2 enters the right half-plane"
    } else if v < 0.0 {
        "stable window for this weight"
    } else {
        "marginal"
    }
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Report> {
    let m = model_and_options(cfg)?;
    let w = cfg.weight_spec(&m)?.w_plus;
    let sc = cfg.spectrum;
    let range = (sc.h_min, sc.h_max);
    let threads = parallel::thread_cap()?;
    let params = m.params;
    let mut curves = parallel::map(vec![1u8, 2], threads, |k| {
        if k == 1 {
            curve_s1(&params, w, range, sc.n_samples)
        } else {
            curve_s2(&params, w, range, sc.n_samples)
        }
    });
    let s2 = curves.pop().expect("two curves");
    let s1 = curves.pop().expect("two curves");
    let col = |c: &[SpectralCurvePoint], f: fn(&SpectralCurvePoint) -> f64| c.iter().map(f).collect::<Vec<f64>>();
    let h = col(&s1, |p| p.h);
    let (re1, im1) = (col(&s1, |p| p.lambda.re), col(&s1, |p| p.lambda.im));
    let (re2, im2) = (col(&s2, |p| p.lambda.re), col(&s2, |p| p.lambda.im));
    let dir = prepare_out(cfg)?;
    write_csv(
        &dir.join("spectrum.csv"),
        &["h", "re_S1", "im_S1", "re_S2", "im_S2"],
        &[&h, &re1, &im1, &re2, &im2],
    )?;
    if cfg.output.emit_svg {
        let svg = svg_plot(
            "partial essential spectrum (Im against Re)",
            "Re lambda",
            &[Series { label: "S1", x: &re1, y: &im1 }, Series { label: "S2", x: &re2, y: &im2 }],
            false,
        );
        fs::write(dir.join("spectrum.svg"), svg)?;
    }
    let v2 = max_unstable_real_part(&m.params, w);
    let mut r = Report::new();
    r.line(format!(
        "partial essential spectrum for w_plus = {w:?}: {} samples of h in [{:?}, {:?}]",
        sc.n_samples, sc.h_min, sc.h_max
    ));
    r.line(format!("Re_max(S1) = {:?}", s1_vertex(&m.params, w)));
    r.line(format!("Re_max(S2) = {v2:?} ({})", vertex_note(v2)));
    Ok(r)
}

fn simulator(cfg: &RunConfig) -> Result<(Model, Simulator)> {
    let m = model_and_options(cfg)?;
    let ws = cfg.weight_spec(&m)?;
    let profile = compute(&m, &cfg.wave)?;
    let sim = Simulator::new(&profile, cfg.grid, ws, cfg.sim.options())?;
    Ok((m, sim))
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Report> {
    let (_, mut sim) = simulator(cfg)?;
    let res = run_instability(&mut sim, &cfg.sim.instability())?;
    let dir = prepare_out(cfg)?;
    let col = |f: fn(&crate::simulator::NormSample) -> f64| res.trace.iter().map(f).collect::<Vec<f64>>();
    let (t, nx, nd, mv) = (col(|s| s.t), col(|s| s.norm_x), col(|s| s.norm_d), col(|s| s.min_weighted_v));
    write_csv(&dir.join("norms.csv"), &["t", "norm_X", "norm_D", "min_weighted_v"], &[&t, &nx, &nd, &mv])?;
    if cfg.output.emit_svg {
        let svg = svg_plot(
            "perturbation norms",
            "t",
            &[Series { label: "norm_D", x: &t, y: &nd }, Series { label: "norm_X", x: &t, y: &nx }],
            true,
        );
        fs::write(dir.join("norms.svg"), svg)?;
    }
    let mut r = Report::new();
    r.line(format!(
        "grid [{:?}, {:?}] with {} points, w_plus = {:?}, T = {:?}",
        cfg.grid.l_minus, cfg.grid.l_plus, cfg.grid.n, cfg.weight.w_plus, cfg.sim.t_final
    ));
    r.line(format!("fit window: norm_D in [{:.3e}, {:.3e}]", res.fit_lo, res.fit_hi));
    match res.fit {
        Some(f) => r.line(format!(
            "fitted rate {:.4} ± {:.1e} over t in [{:.2}, {:.2}], predicted {:?}",
            f.rate, f.rate_stderr, f.t_start, f.t_end, res.predicted
        )),
        None => {
            r.line(format!("no growth window (predicted rate {:?})", res.predicted));
            r.code = EXIT_NO_RESULT;
        }
    }
    Ok(r)
}

pub fn cmd_escape(cfg: &RunConfig) -> Result<Report> {
    let (_, mut sim) = simulator(cfg)?;
    let esc = cfg.sim.escape;
    let res = time_one_map_escape(&mut sim, &cfg.sim.perturbation, &esc)?;
    let dir = prepare_out(cfg)?;
    let n: Vec<f64> = (0..res.norms.len()).map(|i| i as f64).collect();
    write_csv(&dir.join("escape.csv"), &["n", "norm_D"], &[&n, &res.norms])?;
    if cfg.output.emit_svg {
        let svg = svg_plot("time-one map iterates", "n", &[Series { label: "norm_D", x: &n, y: &res.norms }], true);
        fs::write(dir.join("escape.svg"), svg)?;
    }
    let mut r = Report::new();
    let last = *res.norms.last().expect("initial norm recorded");
    match res.escape_n {
        Some(k) => r.line(format!(
            "escaped at n = {k}: norm_D = {last:.4e} >= epsilon0 = {:e} (from A0 = {:e})",
            esc.epsilon0, esc.amplitude
        )),
        None => {
            r.line(format!(
                "no escape within n_max = {} iterations: final norm_D = {last:.4e} < epsilon0 = {:e}",
                esc.n_max, esc.epsilon0
            ));
            r.code = EXIT_NO_RESULT;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_in(dir: &Path) -> RunConfig {
        let mut c = RunConfig::default();
        c.output.dir = dir.to_path_buf();
        c
    }

    #[test]
    fn check_reference() {
        let r = cmd_check(&RunConfig::default()).unwrap();
        assert_eq!(r.code, 0);
        assert!(r.lines.iter().any(|l| l == "max Re on S2 = 1.0"));
    }

    #[test]
    fn check_rejections() {
        let mut c = RunConfig::default();
        c.weight.w_plus = 5.0;
        let e = cmd_check(&c).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
        assert!(e.to_string().contains("w_plus = 5 outside J"));
        let mut c = RunConfig::default();
        c.model.c = 2.0;
        let e = cmd_check(&c).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
        assert!(e.to_string().contains("existence condition c > 2·sqrt(gamma) fails"));
    }

    #[test]
    fn spectrum_lines_and_rows() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = cfg_in(tmp.path());
        let r = cmd_spectrum(&c).unwrap();
        assert!(r.lines.iter().any(|l| l.starts_with("Re_max(S2) = 1.0")));
        c.weight.w_plus = 0.5;
        c.spectrum.h_min = -1.0;
        c.spectrum.h_max = 1.0;
        let r = cmd_spectrum(&c).unwrap();
        assert!(r.lines.iter().any(|l| l == "Re_max(S2) = -0.25 (stable window for this weight)"));
        let text = fs::read_to_string(tmp.path().join("spectrum.csv")).unwrap();
        let (h, cols) = crate::io::read_csv(&text).unwrap();
        assert_eq!(h, vec!["h", "re_S1", "im_S1", "re_S2", "im_S2"]);
        assert_eq!(cols[0].len(), 601);
        assert_eq!((cols[0][0], cols[0][600]), (-1.0, 1.0));
        assert!(tmp.path().join("config.json").exists());
    }

    #[test]
    fn wave_span_failure_is_no_result() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = cfg_in(tmp.path());
        c.wave.xi_span_max = 1.0;
        let e = cmd_wave(&c).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_NO_RESULT);
        assert!(e.to_string().contains("span exceeded"));
    }

    #[test]
    fn guard_exit_code() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = cfg_in(tmp.path());
        c.grid.n = 256;
        c.sim.perturbation.amplitude = 1e60;
        c.sim.perturbation.carrier_h = 1.0;
        let e = cmd_simulate(&c).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_GUARD);
        assert!(e.to_string().starts_with("singularity guard"));
    }
}
