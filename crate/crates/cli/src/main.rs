//! `ragged`: inspect, validate, round-trip and benchmark buffer containers.
//!
//! Exit codes: 0 ok, 1 I/O, 2 format, 3 validation or layout, 4 round-trip mismatch.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::report::{exit, CliError, Report};

#[derive(Parser)]
#[command(name = "ragged", version, about)]
struct Cli {
    /// Print one JSON report object instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show a container's form, length and buffer sizes.
    Inspect { path: PathBuf },
    /// Reassemble a container and check every layout invariant.
    Validate { path: PathBuf },
    /// Read, reassemble, re-serialize and write to --out, checking nothing was copied.
    Roundtrip {
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Select opposite-charge dimuon events with invariant mass above 70.
    Dimuon {
        path: Option<PathBuf>,
        /// Generate N synthetic events instead of reading PATH.
        #[arg(long = "gen", value_name = "N")]
        gen: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Time the columnar and row-wise kernels and compare their output.
        #[arg(long)]
        bench: bool,
        /// Write the selected masses as a float64 container.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum every element of a list-of-float64 container.
    Sum { path: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Inspect { .. } => "inspect",
            Command::Validate { .. } => "validate",
            Command::Roundtrip { .. } => "roundtrip",
            Command::Dimuon { .. } => "dimuon",
            Command::Sum { .. } => "sum",
        }
    }
}

fn run(command: &Command, report: &mut Report) -> Result<(), CliError> {
    match command {
        Command::Inspect { path } => commands::inspect(path, report),
        Command::Validate { path } => commands::validate(path, report),
        Command::Roundtrip { path, out } => commands::roundtrip(path, out, report),
        Command::Sum { path } => commands::sum(path, report),
        Command::Dimuon {
            path,
            gen,
            seed,
            bench,
            out,
        } => commands::dimuon(
            commands::DimuonArgs {
                path: path.as_deref(),
                gen: *gen,
                seed: *seed,
                bench: *bench,
                out: out.as_deref(),
            },
            report,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = Report::new(cli.command.name());
    let code = match run(&cli.command, &mut report) {
        Ok(()) => exit::OK,
        Err(err) => {
            let code = err.code;
            report = report.fail(&err);
            code
        }
    };
    if cli.json {
        println!(
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        );
    } else if code == exit::OK {
        print!("{report}");
    } else {
        eprint!("{report}");
    }
    ExitCode::from(code)
}
