use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use slicelab_cli::{run_with_threads, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = run_with_threads(&config);
    if let Some(report) = &outcome.report {
        let written = match &config.output {
            Some(path) => std::fs::write(path, report).map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => std::io::stdout()
                .write_all(report)
                .map_err(|e| format!("cannot write report: {e}")),
        };
        if let Err(msg) = written {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    }
    if let Some(msg) = &outcome.message {
        eprintln!("error: {msg}");
    }
    ExitCode::from(outcome.code as u8)
}
