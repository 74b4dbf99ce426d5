use std::process::ExitCode;

use clap::Parser;
use valvol::{error_line, execute, seed_from_env, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = seed_from_env().and_then(|seed| execute(&cli, seed));
    match result {
        Ok(out) => {
            print!("{}", out.render(cli.format));
            eprintln!("{}", out.summary);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: code=CHECK_FAILED message=\"an internal cross-check failed\"");
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::FAILURE
        }
    }
}
