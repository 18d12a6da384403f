use clap::Parser;

fn main() {
    let cli = chemowave::cli::Cli::parse();
    let code = chemowave::cli::run(&cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
