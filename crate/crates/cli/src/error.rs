use std::path::PathBuf;

use majorana_core::expr::ParseError;
use majorana_core::Error as CoreError;
use thiserror::Error;

/// Exit codes of the command-line contract.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CONFIG: u8 = 1;
    pub const TOLERANCE: u8 = 2;
    pub const PHYSICS: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid potential expression: {0}")]
    Expression(#[from] ParseError),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{0}")]
    Physics(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Read { .. }
            | Self::Write { .. }
            | Self::Json(_)
            | Self::Config(_)
            | Self::Expression(_) => exit::CONFIG,
            Self::Physics(_) => exit::PHYSICS,
            Self::Core(e) => match e {
                CoreError::BrokenSusy { .. }
                | CoreError::WrongSector { .. }
                | CoreError::BothSectorsNormalizable
                | CoreError::InvalidFamily { .. }
                | CoreError::NotShapeInvariant { .. }
                | CoreError::NoPlusGroundState
                | CoreError::NegativeEigenvalue { .. }
                | CoreError::NoPeriod => exit::PHYSICS,
                CoreError::Instability { .. } | CoreError::Divergence { .. } => exit::TOLERANCE,
                _ => exit::CONFIG,
            },
        }
    }
}
