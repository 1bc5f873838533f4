use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = mmlink_cli::Cli::parse();
    match mmlink_cli::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
