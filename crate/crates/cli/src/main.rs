use std::process::ExitCode;

use clap::Parser;
use twisted_torsion_cli::{emit, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command).and_then(|r| emit(&cli, &r)) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
