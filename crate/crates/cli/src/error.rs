use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const SEMANTIC: i32 = 3;
    pub const ORACLE: i32 = 4;
    pub const RESOURCE: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed JSON or a value of the wrong type.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed JSON that violates the file schema.
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error(transparent)]
    Semantic(#[from] qfg_core::Error),
    #[error("oracle mismatch: {0}")]
    Oracle(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Schema(_) | CliError::Usage(_) => exit::PARSE,
            CliError::Semantic(qfg_core::Error::Resource { .. }) => exit::RESOURCE,
            CliError::Semantic(qfg_core::Error::Internal(_)) => exit::INTERNAL,
            CliError::Semantic(_) => exit::SEMANTIC,
            CliError::Oracle(_) => exit::ORACLE,
            CliError::Io { .. } => exit::INTERNAL,
        }
    }
}
