//! Batch front end. Exit codes: 0 pass, 1 check failed, 2 input error,
//! 3 runtime event (breaking, size guard, numerical failure).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::Error;

mod commands;
mod problem;

pub use problem::{ProblemFile, SimulationBlock};

#[derive(Debug, Parser)]
#[command(name = "hydrobracket", version, about = "Nonlocal hydrodynamic-type brackets, canonical pairs and their hierarchies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// machine-readable output
    #[arg(long, global = true)]
    pub json: bool,
    /// tolerance for numerical checks
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// seed for probe points used to find witnesses
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Poisson conditions of the bracket in a problem file
    CheckPoisson { file: PathBuf },
    /// Poisson and compatibility conditions against the file's eta
    CheckCompat { file: PathBuf },
    /// Poisson conditions of the pencil of two brackets
    CheckPencil { first: PathBuf, second: PathBuf },
    /// equations on the potentials H, side by side with the Poisson check
    CheckCanonical { file: PathBuf },
    /// the bracket generated by (eta, K, H)
    BuildCanonical { file: PathBuf },
    /// Liouville function, and potentials when eta is given
    Liouville { file: PathBuf },
    /// flows of the hierarchy with commutation and involution verdicts
    Hierarchy {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// `h0` (eta·h(0) at level 1), `zero`, or per-level covectors `a,b;c,d`
        #[arg(long, default_value = "h0")]
        gauge: String,
    },
    /// integrate one flow of the hierarchy on a periodic grid
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value = "h0")]
        gauge: String,
        /// apply the 2/3 rule to every right-hand side
        #[arg(long)]
        dealias: bool,
    },
    /// symbolic (and, with a simulation block, numeric) commutation of two flows
    Commute {
        file: PathBuf,
        /// two hierarchy levels
        #[arg(long, default_value = "1,2")]
        flows: String,
        #[arg(long, default_value = "h0")]
        gauge: String,
        /// flow-map time for the numeric check
        #[arg(long, default_value_t = 1e-2)]
        tau: f64,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. }
        | Error::UnknownVariable { .. }
        | Error::NonIntegerExponent { .. }
        | Error::TranscendentalNotAllowed { .. }
        | Error::NotRational
        | Error::Dimension(_)
        | Error::TooManyZeroConstants(_)
        | Error::DegenerateMetric
        | Error::Input(_) => 2,
        Error::NotClosed(_) => 1,
        _ => 3,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match commands::execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
