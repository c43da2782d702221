use thiserror::Error;

use crate::fabric::CmKind;

/// Errors raised by the fixed-point kernels and the fabric model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value does not fit in {format}")]
    Overflow { format: String },

    #[error("invalid Q format Q{integer_bits}.{fraction_bits}")]
    InvalidFormat { integer_bits: u8, fraction_bits: u8 },

    #[error("operand formats differ: {left} vs {right}")]
    FormatMismatch { left: String, right: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("filter must have between 1 and {max} taps, got {actual}")]
    TapCount { max: usize, actual: usize },

    #[error("expansion horizon {horizon} is shorter than the filter length {length}")]
    HorizonTooSmall { horizon: usize, length: usize },

    #[error("input length {0} is odd")]
    OddLength(usize),

    #[error("input length {actual} is shorter than the minimum {minimum}")]
    TooShort { actual: usize, minimum: usize },

    #[error("input length {length} cannot be decomposed into {levels} levels")]
    BadLength { length: usize, levels: usize },

    #[error("dilation pair rejected: {0}")]
    DilationPair(String),

    #[error("unsupported transform size {0}")]
    UnsupportedSize(usize),

    #[error("block shape must be 16x16, got {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize },

    #[error("pool exhausted: {kind} needs {needed}, {available} available")]
    PoolExhausted {
        kind: CmKind,
        needed: usize,
        available: usize,
    },

    #[error("pool already holds an active configuration")]
    AlreadyConfigured,

    #[error("pool has no active configuration")]
    NotConfigured,

    #[error("input arity mismatch: netlist has {expected} ports, vector has {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("invalid netlist: {0}")]
    InvalidNetlist(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
