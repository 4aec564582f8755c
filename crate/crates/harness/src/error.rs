use stk_core::KinematicsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] KinematicsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Process exit status: 2 for configuration problems, 3 for numeric and
    /// I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numeric(KinematicsError::UnknownField(_))
            | HarnessError::Numeric(KinematicsError::InvalidParameter { .. }) => 2,
            HarnessError::Numeric(_) | HarnessError::Io(_) => 3,
        }
    }
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
