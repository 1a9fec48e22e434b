use thiserror::Error;

/// Errors from polynomial arithmetic and parsing.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable-count mismatch: {left} vs {right}")]
    NvarsMismatch { left: usize, right: usize },
    #[error("operation undefined on the zero polynomial")]
    ZeroInput,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("variable index {index} out of range 1..={nvars} at byte {offset}")]
    VarOutOfRange {
        index: usize,
        nvars: usize,
        offset: usize,
    },
}
