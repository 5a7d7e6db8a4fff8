use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// An extension step could not satisfy the per-element count equations.
    #[error("construction error at element {index}: {reason}")]
    Construction { index: usize, reason: String },

    #[error("no singleton position assignment found after {attempts} attempts")]
    SearchExhausted { attempts: usize },

    #[error("sequence is not a cyclic Gray code on {n_bits} bits")]
    InvalidGrayCode { n_bits: usize },

    #[error("index {index} out of range 1..={n_bits}")]
    IndexOutOfRange { index: usize, n_bits: usize },

    #[error("configuration {word} does not fit in {n_bits} bits")]
    ConfigurationOutOfRange { word: u64, n_bits: usize },

    #[error("boolean map carries no removed-direction table")]
    MissingDirections,

    #[error("set of iteration counts is empty")]
    EmptyPeriods,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    InvalidEpsilon(f64),

    #[error("prefix too short: needed {needed}, available {available}")]
    InsufficientDepth { needed: usize, available: usize },

    #[error("too few samples: needed {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("analysis limited to N <= {cap}, got N = {n_bits}")]
    AnalysisCap { n_bits: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
