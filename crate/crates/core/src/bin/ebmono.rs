use std::process::ExitCode;

use clap::Parser;
use ebmono::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ebmono: {e}");
            ExitCode::FAILURE
        }
    }
}
