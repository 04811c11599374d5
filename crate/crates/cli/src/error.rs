use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] dirac2c::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Oracle(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 = config error, 2 = numerical-guard violation, 3 = oracle failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numerical_guard() => 2,
            CliError::Oracle(_) => 3,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "numerical_guard",
            3 => "oracle_failure",
            _ => match self {
                CliError::Io { .. } => "io",
                _ => "config",
            },
        }
    }

    /// Single-line JSON suitable for stderr.
    pub fn json_line(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
