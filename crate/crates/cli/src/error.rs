//! Error classification and process exit codes: 0 success, 2 usage,
//! 3 parse, 4 config/merge mismatch, 5 size limits.

use std::path::Path;

use thiserror::Error;

use hypercount_core::{BankError, PatternError, SketchError};

use crate::parse::ParseError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    SizeLimit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::Config(_) => 4,
            CliError::SizeLimit(_) => 5,
        }
    }

    pub fn parse(path: &Path, err: ParseError) -> CliError {
        let path = path.display().to_string();
        match err {
            ParseError::EdgeTooLarge { .. } => {
                CliError::SizeLimit(format!("{}: {}", path, err))
            }
            other => CliError::Parse {
                path,
                message: other.to_string(),
            },
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> CliError {
        CliError::Parse {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn pattern(path: &Path, err: PatternError) -> CliError {
        match err {
            PatternError::TooLarge(msg) => {
                CliError::SizeLimit(format!("{}: pattern too large: {}", path.display(), msg))
            }
            other => CliError::Parse {
                path: path.display().to_string(),
                message: other.to_string(),
            },
        }
    }

    pub fn sketch(context: &str, err: SketchError) -> CliError {
        match err {
            SketchError::EdgeTooLarge { .. } => {
                CliError::SizeLimit(format!("{}: {}", context, err))
            }
            SketchError::BasisMismatch
            | SketchError::FingerprintMismatch
            | SketchError::VersionMismatch(_) => CliError::Config(format!("{}: {}", context, err)),
            other => CliError::Parse {
                path: context.to_string(),
                message: other.to_string(),
            },
        }
    }

    pub fn bank(context: &str, err: BankError) -> CliError {
        match err {
            BankError::ConfigMismatch(msg) => {
                CliError::Config(format!("{}: configuration mismatch: {}", context, msg))
            }
            BankError::InvalidEpsilon(e) => {
                CliError::Usage(format!("epsilon {} is not in (0, 1)", e))
            }
            BankError::InvalidParameter(msg) => CliError::Usage(msg),
            BankError::TooFewCopies => CliError::Usage("at least two copies required".into()),
            BankError::Sketch(e) => CliError::sketch(context, e),
        }
    }
}
