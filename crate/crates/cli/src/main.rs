use clap::Parser;
use ssa_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("ssa: {e}");
        std::process::exit(e.exit_code());
    }
}
