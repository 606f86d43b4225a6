use std::fmt;
use std::path::Path;

use serde_json::json;
use spectra_core::SpectraError;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Computation,
    Io,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Config => 2,
            Kind::Computation => 3,
            Kind::Io => 4,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Kind::Config => "config",
            Kind::Computation => "computation",
            Kind::Io => "io",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Config,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError {
            kind: Kind::Io,
            message: format!("{}: {err}", path.display()),
        }
    }

    pub fn payload(&self) -> String {
        json!({
            "error": {
                "kind": self.kind.label(),
                "exit_code": self.kind.exit_code(),
                "message": self.message,
            }
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        // Anything decidable from the inputs alone is a configuration error.
        let kind = match e {
            SpectraError::InvalidParameter { .. }
            | SpectraError::WindowTooSmall(_)
            | SpectraError::Parse { .. }
            | SpectraError::Format(_)
            | SpectraError::PointBudgetExceeded { .. }
            | SpectraError::MatrixTooLarge { .. }
            | SpectraError::SingularShift(_)
            | SpectraError::SingularOutsidePlateau { .. }
            | SpectraError::EmptySet => Kind::Config,
            _ => Kind::Computation,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
