use std::io::Write;
use std::process::ExitCode;

use bispec::cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (stdout, error, code) = run(&cli);
    let _ = std::io::stdout().write_all(stdout.as_bytes());
    if let Some(e) = error {
        eprintln!("error: {e}");
    }
    ExitCode::from(code)
}
