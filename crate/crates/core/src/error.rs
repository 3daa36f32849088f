use std::fmt;
use std::path::PathBuf;

use crate::ingest::Attribute;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single rejected configuration field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("schema error: column \"{column}\" not found in header")]
    Schema { column: String },

    #[error("duplicate bug id \"{id}\"")]
    DuplicateId { id: String },

    #[error("line {line}: {message}")]
    Row { line: u64, message: String },

    #[error("unknown {attribute} category \"{label}\"")]
    UnknownCategory { attribute: Attribute, label: String },

    #[error("input contains no bug reports")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("infeasible k: {k} clusters requested but only {distinct} distinct feature vectors")]
    InfeasibleK { k: usize, distinct: usize },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("frequent itemset table integrity violated: {0}")]
    TableIntegrity(String),

    #[error("duplicate rule: {0}")]
    DuplicateRule(String),

    #[error("{attribute} code {code} has no label in its codebook")]
    Codebook { attribute: Attribute, code: u32 },

    #[error("invalid configuration: {}", join(.0))]
    Validation(Vec<FieldError>),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("self-audit failed: {}", .0.join("; "))]
    Invariant(Vec<String>),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn join(errors: &[FieldError]) -> String {
    errors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 validation, 2 I/O, 3 internal invariant failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema { .. }
            | Error::DuplicateId { .. }
            | Error::Row { .. }
            | Error::UnknownCategory { .. }
            | Error::EmptyInput
            | Error::Parameter(_)
            | Error::InfeasibleK { .. }
            | Error::Validation(_)
            | Error::Csv(_) => 1,
            Error::Io { .. } => 2,
            Error::Consistency(_)
            | Error::TableIntegrity(_)
            | Error::DuplicateRule(_)
            | Error::Codebook { .. }
            | Error::Invariant(_)
            | Error::Json(_) => 3,
        }
    }
}
