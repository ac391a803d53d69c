use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = ktd_cli::cli::Cli::parse();
    match ktd_cli::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
