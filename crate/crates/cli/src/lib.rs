//! Library side of the `srs` binary. [`run_to`] parses an argument vector,
//! executes the command and returns the process exit code, so the whole
//! CLI can be driven from tests.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub mod args;
pub mod commands;
pub mod figures;
pub mod job;
pub mod scan;

use args::Cli;
use srs_core::error::SrsError;

/// Exit code for success, including a mathematical "false".
pub const EXIT_OK: i32 = 0;
/// Exit code for usage errors and invalid input.
pub const EXIT_USAGE: i32 = 1;
/// Exit code when a resource cap was hit and no verdict is available.
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(SrsError),
}

impl From<SrsError> for CliError {
    fn from(e: SrsError) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => {
                write!(f, "{e}")?;
                match e {
                    SrsError::StepCap(_) => write!(f, " (inconclusive; raise --cap-steps)"),
                    SrsError::PointCap(_) => write!(f, " (inconclusive; raise --cap-points)"),
                    SrsError::PrecisionCap(_) => write!(f, " (inconclusive; raise --precision)"),
                    _ => Ok(()),
                }
            }
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_inconclusive() => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Runs with the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_to(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_to<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = job::resolve(cli).and_then(|(common, cmd)| commands::execute(&common, &cmd, out));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
