use thiserror::Error;

/// Errors produced by set algebra, statistics and pipeline operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: u32, right: u32 },

    #[error("dimension {dim} out of range (valid: 1..={max})")]
    DimOutOfRange { dim: u32, max: u32 },

    #[error("{op}: empty set not allowed")]
    EmptySet { op: &'static str },

    #[error("{op}: element {elem} has a bit above dimension {dim}")]
    ElementOutOfRange { op: &'static str, elem: u64, dim: u32 },

    #[error("{op}: requires n <= {max}, got n = {got}")]
    DimTooLarge { op: &'static str, max: u32, got: u32 },

    #[error("{op}: size cap exceeded ({value} > {cap})")]
    CapExceeded { op: &'static str, value: u64, cap: u64 },

    #[error("{op}: {what} not contained in {in_what} (witness: {witness})")]
    NotContained {
        op: &'static str,
        what: &'static str,
        in_what: &'static str,
        witness: String,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{op}: pair energy {measured} is below the required bound {bound}")]
    EnergyBelowBound {
        op: &'static str,
        measured: String,
        bound: String,
    },

    #[error("bsg_extract: no candidate subset met the documented size/doubling contract")]
    BsgContractUnmet,
}

pub type Result<T> = std::result::Result<T, Error>;
