//! The `qric` command-line front end.
//!
//! Every subcommand writes one JSON report (to `--out`, default standard
//! output) and a short summary on standard error. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | every check passed |
//! | 1 | some check failed |
//! | 2 | configuration error |
//! | 3 | size guard tripped |
//! | 4 | I/O failure |

mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;

pub use report::Report;

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 0x51C0_2024;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qric", version, about = "Qudit telecloning and remote information concentration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Telecloning of a random qudit to N clones.
    Teleclone(RunArgs),
    /// Many-to-one information concentration.
    Ric(RunArgs),
    /// Many-to-many concentration over a GHZ-extended channel.
    RicMmGhz(RunArgs),
    /// Many-to-many concentration of L information qudits.
    RicMmMulti(RunArgs),
    /// Identity, equivalence and entanglement checks.
    Verify(RunArgs),
    /// Stabilizer expectations of a channel.
    Stabilizers(RunArgs),
    /// Unlocking of the Smolin-like bound entangled channel.
    Unlock(RunArgs),
    /// Full report: verification plus protocol runs.
    Report(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Sample,
    AllBranches,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BbarArg {
    Clone,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Qudit dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of clones / senders.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Number of output legs for the many-to-many variants.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Channel preset name or path to a JSON channel spec.
    #[arg(long)]
    pub channel: Option<String>,
    /// Branch handling; defaults to `sample` when `--trials` is given.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Trials in sample mode, leaf budget for stratified all-branches runs.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override for the numeric check tolerances.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Report destination; `-` is standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Background source for `ric-mm-multi`.
    #[arg(long, value_enum, default_value = "clone")]
    pub bbar: BbarArg,
    /// Include wall-clock timings (makes the report non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error that aborted a run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeGuard { .. } => EXIT_GUARD,
        Error::Io(_) => EXIT_IO,
        Error::Verification(_) => EXIT_CHECK_FAILED,
        _ => EXIT_CONFIG,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_uppercase_flags() {
        let cli = Cli::try_parse_from(["qric", "ric-mm-ghz", "--d", "3", "--N", "2", "--L", "2", "--mode", "all-branches"]).unwrap();
        let Command::RicMmGhz(a) = cli.command else { panic!("wrong subcommand") };
        assert_eq!((a.d, a.n, a.l), (Some(3), Some(2), Some(2)));
        assert_eq!(a.mode, Some(ModeArg::AllBranches));
    }

    #[test]
    fn usage_errors_are_config_errors() {
        assert_eq!(run(["qric", "teleclone", "--d", "two"]), EXIT_CONFIG);
        assert_eq!(run(["qric", "nonsense"]), EXIT_CONFIG);
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::SizeGuard { what: "x", dim: 1, limit: 0 }), EXIT_GUARD);
        assert_eq!(exit_code(&Error::InvalidDimension(1)), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), EXIT_IO);
    }
}
