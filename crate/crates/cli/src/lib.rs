//! Library side of the `htype` binary: argument resolution and command
//! execution, kept separate from `main` so tests can drive it in-process.

pub mod args;
pub mod config;
mod run;

use std::fmt;

pub use config::{parse_config, CommandKind, Format, Output, RunConfig, Task};
pub use run::{execute, run};

/// Exit code 2 for anything the user can fix on the command line, 1 for
/// failures of the computation or of a reproduced fact.
#[derive(Debug)]
pub enum CliError {
    Clap(clap::Error),
    Usage(String),
    Engine(htype_core::Error),
    Io(String),
    /// A reproduce scenario ran but an expected fact did not hold.
    Check(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            CliError::Engine(_) | CliError::Io(_) | CliError::Check(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Clap(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Engine(e) => write!(f, "error: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Check(fails) => write!(f, "failed facts: {}", fails.join("; ")),
        }
    }
}

impl std::error::Error for CliError {}

impl From<htype_core::Error> for CliError {
    fn from(e: htype_core::Error) -> Self {
        CliError::Engine(e)
    }
}

/// Parses, runs, reports; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(argv).and_then(|cfg| run(&cfg));
    match result {
        Ok(()) => 0,
        Err(CliError::Clap(e)) => {
            // help and version land here too, with code 0
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
