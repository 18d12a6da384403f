//! Runs a subcommand from a JSON configuration in-process and prints the
//! report, the same path the binary takes.
//!
//! Usage: `cargo run --example run_config -- <check|spectrum|wave> [config.json]`

use chemowave::cli::{execute, Command};
use chemowave::config::RunConfig;

fn main() -> chemowave::Result<()> {
    let mut args = std::env::args().skip(1);
    let command = match args.next().as_deref() {
        Some("wave") => Command::Wave,
        Some("spectrum") => Command::Spectrum,
        _ => Command::Check,
    };
    let mut cfg = match args.next() {
        Some(p) => RunConfig::from_path(p.as_ref())?,
        None => RunConfig::default(),
    };
    cfg.output.dir = std::env::temp_dir().join("chemowave-example");
    let report = execute(command, &cfg)?;
    for line in report.lines {
        println!("{line}");
    }
    println!("exit code {}", report.code);
    Ok(())
}
