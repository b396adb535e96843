use clap::Parser;
use mmw_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("mmw {}: {e}", cli.command.name());
        std::process::exit(e.exit_code());
    }
}
