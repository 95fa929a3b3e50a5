use thiserror::Error;

/// Stable process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const NOT_SUBCOMPLEX: i32 = 3;
    pub const NOT_A_CYCLE: i32 = 4;
    pub const BOUNDARY_MISMATCH: i32 = 5;
    pub const DIMENSION_OVERFLOW: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid input: {0}")]
    Schema(String),
    #[error("the subcomplex is not contained in the complex")]
    NotSubcomplex,
    #[error("the chain is not a cycle; oriented boundary residue: {residue}")]
    NotACycle { residue: String },
    #[error("∂s̃ differs from s₁ − s₀; residue: {residue}")]
    BoundaryMismatch { residue: String },
    #[error("dimension {requested} exceeds the configured maximum {max} (ORICHAIN_MAX_DIM)")]
    DimensionOverflow { requested: usize, max: usize },
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Schema(_) => exit::SCHEMA,
            CliError::NotSubcomplex => exit::NOT_SUBCOMPLEX,
            CliError::NotACycle { .. } => exit::NOT_A_CYCLE,
            CliError::BoundaryMismatch { .. } => exit::BOUNDARY_MISMATCH,
            CliError::DimensionOverflow { .. } => exit::DIMENSION_OVERFLOW,
            CliError::VerifyFailed(_) => exit::VERIFY_FAILED,
            // arithmetic overflow and similar; not a user error but still a failure
            CliError::Internal(_) => exit::VERIFY_FAILED,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}
