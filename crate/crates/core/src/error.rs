use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension {0} is not supported (only 2 and 4)")]
    UnsupportedDim(usize),
    #[error("matrix dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("tensor product of dims {0} and {1} would exceed dim 4")]
    TensorTooLarge(usize, usize),
    #[error("non-finite entry produced at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("unphysical weak-measurement pair: F^2 + G^2 = {0} > 1")]
    UnphysicalWeakPair(f64),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("setting index {value} exceeds maximum {max}")]
    SettingOutOfRange { value: usize, max: usize },
    #[error("observer selection entry {0} outside 1..={1}")]
    SelectionOutOfRange(usize, usize),
    #[error("observer selection has {0} entries, expected {1}")]
    SelectionLength(usize, usize),
    #[error("state is not a valid density operator: {0}")]
    InvalidState(String),
    #[error("missing correlator table entry at (x={x}, y={y})")]
    MissingCorrelator { x: usize, y: usize },
    #[error("closed-form noise bound only derived for m = 2 with uniform selection: {0}")]
    UnsupportedNoiseCase(String),
    #[error("joint enumeration is capped at 3 branches, got {0}")]
    TooManyBranches(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
