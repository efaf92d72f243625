use std::process::ExitCode;

use clap::Parser;
use ksplit::cli::{execute, Cli, JobSpec};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = JobSpec::from_cli(cli).and_then(|job| execute(&job));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ksplit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
