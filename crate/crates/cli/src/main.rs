//! `z2band`: command-line front end to the `z2band` library.
//!
//! Exit codes: 0 success, 1 failed validation or computation, 2 unreadable
//! input or bad options, 3 ambiguous square-root branch.

mod args;
mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Failure, Outcome};

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("Z2BAND_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("Z2BAND_THREADS must be a non-negative integer, got '{raw}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Validate(a) => commands::validate(a),
        Command::Invariant(a) => commands::invariant(a),
        Command::Berry(a) => commands::berry(a),
        Command::Tqft(a) => commands::tqft(a),
    }
}

fn output_path(cli: &Cli) -> Option<&std::path::Path> {
    let out = match &cli.command {
        Command::Validate(a) => &a.out,
        Command::Invariant(a) => &a.out,
        Command::Berry(a) => &a.out,
        Command::Tqft(a) => &a.out,
    };
    out.output.as_deref()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {f}");
            if matches!(&f, Failure::Ambiguous(m) if !m.contains("--path-samples")) {
                eprintln!("hint: rerun with a larger --path-samples");
            }
            return ExitCode::from(f.code() as u8);
        }
    };
    let written = match output_path(&cli) {
        Some(p) => std::fs::write(p, &outcome.text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.code as u8)
}
