use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flatkahler::groups::DEFAULT_BOUND;
use flatkahler::Execution;
use flatkahler_cli::commands::{run_file, CliError, Command, Options, EXIT_OK, EXIT_PARSE};

/// Classify flat Kähler manifolds given as quotients of product tori.
#[derive(Parser, Debug)]
#[command(name = "flatkahler", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Largest group closure or normalizer image to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BOUND)]
    bound: usize,
    /// Write the JSON report to this path (`-` for standard output).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// List every class in each orbit.
    #[arg(long, global = true)]
    orbit_details: bool,
    /// Run on a single thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Count special classes and biholomorphism classes.
    Classify { spec: PathBuf },
    /// Automorphism group of the manifold given by the spec's cocycle.
    Aut { spec: PathBuf },
    /// First and second cohomology and the fixed torus.
    Cohomology { spec: PathBuf },
    /// Whether the spec's cocycle gives a free action.
    FreeCheck { spec: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { EXIT_OK });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let (command, spec) = match &cli.command {
        Cmd::Classify { spec } => (Command::Classify, spec),
        Cmd::Aut { spec } => (Command::Aut, spec),
        Cmd::Cohomology { spec } => (Command::Cohomology, spec),
        Cmd::FreeCheck { spec } => (Command::FreeCheck, spec),
    };
    let options = Options {
        bound: cli.bound,
        orbit_details: cli.orbit_details,
        execution: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    let outcome = run_file(command, spec, &options)?;
    let json = outcome.document.to_json();
    match cli.json.as_deref() {
        Some(p) if p.as_os_str() == "-" => println!("{json}"),
        Some(p) => {
            fs::write(p, json + "\n").map_err(|source| CliError::Write {
                path: p.to_path_buf(),
                source,
            })?;
            print!("{}", outcome.document.to_text());
        }
        None => print!("{}", outcome.document.to_text()),
    }
    Ok(outcome.exit_code)
}
