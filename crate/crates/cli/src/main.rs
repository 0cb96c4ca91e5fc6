use std::process::ExitCode;

use clap::Parser;
use sympow_cli::error::{report_exit_code, EXIT_USAGE};
use sympow_cli::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let doc = match sympow_cli::run(&cli) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json = doc.to_json();
    match &cli.global.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
        None => println!("{json}"),
    }
    for c in doc.failed_checks() {
        eprintln!("FAILED: {}", c.name);
    }
    ExitCode::from(report_exit_code(doc.passed) as u8)
}
