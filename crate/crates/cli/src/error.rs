use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Help or version text requested; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Usage(String),
    #[error("unknown subcommand `{0}`")]
    UnknownSubcommand(String),
    #[error("unknown flag `--{0}`")]
    UnknownFlag(String),
    #[error("missing required flag `--{0}`")]
    MissingRequired(String),
    #[error("`--{key}` expects {expected}, got `{value}`")]
    TypeError { key: String, value: String, expected: &'static str },
    #[error("`--{key}`: unknown family `{value}`")]
    UnknownFamily { key: String, value: String },
    #[error("`--{key}` does not apply to `{choice}`")]
    Inapplicable { key: String, choice: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: lslab::Error },
    #[error("{path}: no matrix named `{name}`")]
    MissingMatrix { path: PathBuf, name: String },
    #[error("{subcommand}: {source}")]
    Module { subcommand: &'static str, source: lslab::Error },
}

impl CliError {
    /// 0 for help, 2 for usage errors, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Io { .. }
            | CliError::Config { .. }
            | CliError::MissingMatrix { .. }
            | CliError::Module { .. } => 1,
            _ => 2,
        }
    }
}
