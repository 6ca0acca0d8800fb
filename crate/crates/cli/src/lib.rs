//! Command-line front end: configuration, sweeps and reproducible output.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure.

pub mod commands;
pub mod config;
pub mod output;
pub mod params;

use std::ffi::OsString;
use std::io::Write;

use thiserror::Error;

pub use commands::{evaluate, Table};
pub use config::{parse_args, Format, Grid, Parsed, RunConfig, Sweep};
pub use params::CommandKind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<cvtri::Error> for CliError {
    fn from(e: cvtri::Error) -> Self {
        use cvtri::Error as E;
        match e {
            E::SingularDrift { .. } | E::AllDiverged(_) | E::InvalidTable(_) | E::DegenerateInference(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

/// Rendered output of a run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub text: String,
    /// Output was produced but the numerics are flagged (exit code 2).
    pub failure: Option<String>,
}

/// Evaluates and renders `cfg`, on a dedicated pool if `threads` is set.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let work = || -> Result<RunOutput, CliError> {
        let table = evaluate(cfg)?;
        Ok(RunOutput { text: output::render(cfg, &table)?, failure: table.failure.clone() })
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(work),
        None => work(),
    }
}

/// Full program: parse, run, write. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_args(args) {
        Ok(Parsed::Run(cfg)) => cfg,
        Ok(Parsed::Info(text)) => {
            print!("{text}");
            return 0;
        }
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let out = match run(&cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("writing {}: {e}", path.display())),
        None => std::io::stdout().write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 1;
    }
    match out.failure {
        Some(msg) => {
            eprintln!("numerical failure: {msg}");
            2
        }
        None => 0,
    }
}
