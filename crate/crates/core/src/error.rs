use thiserror::Error;

/// Errors raised by the decomposition routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// The exhaustive search would visit more subset pairs than allowed.
    #[error("combinatorial search too large: {pairs} subset pairs exceeds the bound of {bound}")]
    SearchTooLarge { pairs: u128, bound: u128 },

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CurError {
    fn from(e: std::io::Error) -> Self {
        CurError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CurError>;
