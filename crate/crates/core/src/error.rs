use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("distance matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },

    #[error("distance d({i},{j}) = {value} outside [0,1]")]
    OutOfRange { i: usize, j: usize, value: Rat },

    #[error("not a metric space: {0}")]
    NotMetric(String),

    #[error("index {index} out of range for a space with {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("value {0} is not a Katetov map over the given space")]
    NotKatetov(String),

    #[error("value {value} is not on the grid [0,1]_{m}")]
    OffGrid { value: Rat, m: u32 },

    #[error("value {0} outside [0,1]")]
    ValueOutOfRange(Rat),

    #[error("invalid distance set: {0}")]
    InvalidDistanceSet(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("distance set fails the 4-values condition: {0}")]
    FourValuesFailure(String),

    #[error("size cap of {cap} points exceeded in round {round}")]
    SizeCapExceeded { cap: usize, round: usize },

    #[error("graph is disconnected: no path from vertex {from} to vertex {to}")]
    Disconnected { from: usize, to: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
