//! Command-line frontend: scenario simulation, historical-data calibration,
//! trajectory evaluation, and scenario comparison.
//!
//! Exit codes: 0 success, 1 validation/parse errors on inputs, 2 runtime
//! errors (simulation failures, fit failures, unwritable outputs).

pub mod artifacts;
pub mod commands;
pub mod error;
pub mod history;
pub mod trajectory_io;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for trajectory_io::Format {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Csv => trajectory_io::Format::Csv,
            FormatArg::Json => trajectory_io::Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Production,
    #[value(name = "population-flow")]
    PopulationFlow,
}

impl From<TargetArg> for commands::CalibrationTarget {
    fn from(arg: TargetArg) -> Self {
        match arg {
            TargetArg::Production => commands::CalibrationTarget::Production,
            TargetArg::PopulationFlow => commands::CalibrationTarget::PopulationFlow,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sdsim",
    version,
    about = "Simulate and evaluate national sustainable-development scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write its trajectory; the convergence report goes
    /// to stdout.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Fit model parameters to a historical-data CSV and write a params file.
    Calibrate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Fit the production exponents freely instead of imposing constant
        /// returns to scale.
        #[arg(long)]
        unconstrained: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a previously emitted trajectory CSV against a scenario's
    /// horizon targets.
    Evaluate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        trajectory: PathBuf,
    },
    /// Run several scenarios and write a comparison table; the first
    /// scenario is the baseline.
    Compare {
        #[arg(long = "scenario", required = true, num_args = 1..)]
        scenario: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Load and fully validate a scenario document without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

/// Parse arguments and dispatch; returns the process exit code.
pub fn cli_main<I>(argv: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            return 1;
        }
    };
    let result = match cli.command {
        Command::Simulate { scenario, out, format } => {
            commands::simulate(&scenario, &out, format.into())
        }
        Command::Calibrate { data, target, unconstrained, out } => {
            commands::calibrate(&data, target.into(), unconstrained, &out)
        }
        Command::Evaluate { scenario, trajectory } => commands::evaluate(&scenario, &trajectory),
        Command::Compare { scenario, out } => commands::compare(&scenario, &out),
        Command::Validate { scenario } => commands::validate(&scenario),
    };
    match result {
        Ok(()) => 0,
        Err(error) => {
            eprintln!("error: {error}");
            error.exit_code()
        }
    }
}
