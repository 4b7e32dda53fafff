use thiserror::Error;

/// Errors raised anywhere in the detection-rule pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),

    #[error("not a Reed-Solomon instance: {0}")]
    NotReedSolomon(String),

    #[error("unsupported field size q = {0} (need 2^m with 2 <= m <= 8)")]
    UnsupportedField(usize),

    #[error("symbol {symbol} at position {position} is outside the alphabet of size {q}")]
    SymbolOutOfRange { position: usize, symbol: u32, q: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("enumeration of {size} words exceeds the bound {bound}")]
    BoundExceeded { size: u128, bound: u128 },

    #[error("codebook has two codewords within radius {radius} of the received word")]
    AmbiguousCodebook { radius: usize },

    #[error("code is not MDS (d = {d}, n - k + 1 = {singleton})")]
    NotMds { d: usize, singleton: usize },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("distance out of range: {value} not in [0, {max}]")]
    DistanceOutOfRange { value: usize, max: usize },

    #[error("invalid game weights: {0}")]
    InvalidWeights(String),

    #[error("invalid sign prior: {0}")]
    InvalidPrior(String),

    #[error("relaxation needs tau > {needed}, code has tau = {tau}")]
    RelaxationTooSmall { tau: u64, needed: u64 },

    #[error("empty distance set")]
    EmptyDistanceSet,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),

    #[error("game matrix is not entrywise positive (min entry {0})")]
    NonPositiveGame(f64),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
