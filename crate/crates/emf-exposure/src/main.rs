use clap::Parser;

use emf_exposure::cli::{run, Cli};

fn main() {
    // Usage errors exit with code 2 via clap; runtime failures with 1.
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
