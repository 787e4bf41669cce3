use thiserror::Error;

/// Errors produced by graph construction, spectral analysis, evolution and routing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is out of range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("invalid coordinate permutation {perm:?} for dimension {d}")]
    InvalidPermutation { perm: Vec<usize>, d: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dense oracle limited to {cap} nodes, got {size}")]
    TooLarge { size: usize, cap: usize },

    #[error("no phase offset satisfies the parity congruences (eigenvalue {eigenvalue} with k = {k})")]
    NoValidOffset { eigenvalue: i64, k: i64 },

    #[error("evolution is not a permutation: node {node} leaks probability {leaked:.3e}")]
    NotAPermutation { node: usize, leaked: f64 },

    #[error("permutation phases disagree at node {node} (deviation {deviation:.3e})")]
    PhaseMismatch { node: usize, deviation: f64 },

    #[error("node {source_node} cannot be routed to node {target} in dimension {d}")]
    Unroutable {
        d: usize,
        source_node: usize,
        target: usize,
    },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(what: &'static str, value: usize, min: usize, max: usize) -> Result<()> {
    if value < min || value > max {
        return Err(Error::OutOfRange {
            what,
            value: value as i64,
            min: min as i64,
            max: max as i64,
        });
    }
    Ok(())
}
