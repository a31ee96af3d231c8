use clap::Parser;
use entcloak::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
