//! Command-line front end: configuration loading, subcommand execution,
//! and deterministic CSV/JSON emission.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;

pub use cli::{Cli, Command, OutputFormat};
pub use config::RunConfig;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ionglow::Error),
    #[error("{0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Runs one fully parsed invocation and writes its report to `--output`
/// (or stdout). Identical configuration and seed produce identical bytes.
pub fn run(cli: &Cli) -> Result<()> {
    let config = config::resolve(cli)?;
    let report = commands::execute(&cli.command, &config)?;
    match &config.output_path {
        Some(path) => {
            std::fs::write(path, report.as_bytes())
                .map_err(CliError::io(format!("writing {}", path.display())))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            handle
                .write_all(report.as_bytes())
                .map_err(CliError::io("writing stdout"))?;
        }
    }
    Ok(())
}
