//! Problem-file front end for the `biconformal` crate: parsing, command
//! drivers and report emission. The `biconformal` binary is a thin wrapper.

pub mod commands;
pub mod problem;
pub mod report;
pub mod syntax;

pub use problem::{parse_problem, ProblemFile, ProjectorSpec, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{line}:{column}: undeclared symbol `{name}`")]
    UndeclaredSymbol { name: String, line: usize, column: usize },
    #[error("missing {what}")]
    MissingComponent { what: String },
    #[error(transparent)]
    Core(#[from] biconformal::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}
