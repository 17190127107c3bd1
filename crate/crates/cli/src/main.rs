//! Command-line front end. Results go to standard output as canonical JSON;
//! failures print an error document and exit 1 (2 for unreadable files and
//! usage errors).

mod commands;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use floerbound::io::to_canonical_json;

#[derive(Debug, Parser)]
#[command(
    name = "floerbound",
    version,
    about = "Steenrod squares, Conley indices and intersection lower bounds"
)]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<String>,
    #[command(subcommand)]
    command: commands::Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = match commands::run(&cli.command) {
        Ok(v) => (to_canonical_json(&v), 0),
        Err(e) => (to_canonical_json(&e.to_json()), e.exit),
    };
    let written = match (&cli.output, code) {
        (Some(path), 0) => std::fs::write(path, &text),
        _ => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("floerbound: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
