//! Error types shared across the crate.

use thiserror::Error;

/// A single validation failure, carrying the offending field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub reason: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

#[derive(Debug, Error)]
pub enum CoreError {
    /// One or more configuration invariants are violated.
    #[error("invalid configuration:\n{}", format_violations(.0))]
    Validation(Vec<Violation>),

    /// Operand shapes do not match the discretization.
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    Dimension {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    /// A factorization or eigenvalue computation failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Invalid argument outside the validation pipeline (e.g. CLI input).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Config file could not be read.
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),

    /// Config file could not be parsed (includes unknown-key failures).
    #[error("cannot parse config file: {0}")]
    Parse(#[from] toml::de::Error),
}

impl CoreError {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CoreError::Validation(vec![Violation {
            field: field.into(),
            reason: reason.into(),
        }])
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, CoreError>;
