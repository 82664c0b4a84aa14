use clap::Parser;

use qsatom::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
