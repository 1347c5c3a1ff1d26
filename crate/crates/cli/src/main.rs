use std::process::ExitCode;

use clap::Parser;
use hamrecon_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hamrecon: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
