mod cli;
mod commands;
mod error;

use std::io::Write as _;

use clap::Parser;

use cli::Cli;

/// Prints a line, exiting quietly if the reader has gone away.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}").and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

fn main() {
    let cli = Cli::parse();
    match commands::run(&cli.command) {
        Ok(out) => {
            if cli.json {
                emit(&serde_json::to_string_pretty(&out.json).expect("values serialize"));
            } else {
                emit(&out.text);
            }
            std::process::exit(out.code);
        }
        Err(e) => {
            if cli.json {
                emit(&serde_json::json!({ "error": e.to_string() }).to_string());
            }
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
