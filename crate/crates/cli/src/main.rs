//! `girlab`: ingest factor and portfolio files, reproduce the five-portfolio
//! momentum example, run distance and out-of-sample studies, and print
//! small-sample diagnostics.

mod diagnose;
mod example;
mod ingest;
mod inputs;
mod manifest;
mod study;

use std::fmt;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use girlab_core::Error;

#[derive(Parser)]
#[command(name = "girlab", version, about = "Generalized Information Ratio toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a raw returns file into the normalized CSV layout.
    Ingest(ingest::Args),
    /// Five-portfolio worked example: FF3 against FF3 plus momentum.
    Example(example::Args),
    /// Rolling-window distance and out-of-sample studies.
    Study(study::Args),
    /// Inverse-covariance bias factor, sample-size advice, link check.
    Diagnose(diagnose::Args),
}

/// A failed command: message plus process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_MISSING: u8 = 3;
pub const EXIT_CONFIG: u8 = 4;
pub const EXIT_NUMERIC: u8 = 5;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    /// Prefix the message with what was being processed.
    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::DateMisalignment(_)
            | Error::EmptyWindow
            | Error::LengthMismatch(..)
            | Error::AssetMismatch => EXIT_INPUT,
            Error::MissingColumn(_) => EXIT_MISSING,
            Error::InvalidSpec(_) | Error::NTooLarge { .. } | Error::DegenerateDof { .. } => EXIT_CONFIG,
            _ => EXIT_NUMERIC,
        };
        Failure::new(code, e.to_string())
    }
}

pub type CmdResult = Result<(), Failure>;

/// Attach a file path to core errors raised while reading it.
pub fn at_path<T>(path: &std::path::Path, r: girlab_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::from(e).context(path.display()))
}

pub fn create_dir(dir: &Path) -> CmdResult {
    std::fs::create_dir_all(dir).map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", dir.display())))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(a) => ingest::run(a),
        Command::Example(a) => example::run(a),
        Command::Study(a) => study::run(a),
        Command::Diagnose(a) => diagnose::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
