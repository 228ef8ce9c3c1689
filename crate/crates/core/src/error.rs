use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid exponent `{0}`: expected an exact rational such as `4/3`, an integer, or `inf`")]
    InvalidExponent(String),

    #[error("exponent out of range: {0}")]
    ExponentRange(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular or numerically rank deficient")]
    Singular,

    #[error("basis is rank deficient (rank {rank} < {k})")]
    RankDeficient { rank: usize, k: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("malformed matrix text: {0}")]
    Parse(String),

    #[error("empty block list")]
    EmptyBlocks,

    #[error("Hadamard order {0} exceeds the size cap 2^{max}", max = crate::hadamard::MAX_ORDER)]
    SizeCap(u32),

    #[error("direct inverse needs p' <= q; apply the construction to the transpose instead")]
    UseDuality,

    #[error("flat-vector induction failed to enlarge the flat set (size {0}); tolerance breakdown")]
    ToleranceBreakdown(usize),

    #[error("spectrum is not normalized: sum of s_i^q = {0}")]
    Unnormalized(f64),

    #[error("r = {r} lies in the obstruction range ({lo}, {hi}); no bounded factorization exists")]
    Obstructed { r: String, lo: String, hi: String },

    #[error("r = {0} lies in the factorable range; an explicit factorization applies instead")]
    Factorable(String),

    #[error("entry ({row}, {col}) lies outside the admissible band")]
    Inadmissible { row: usize, col: usize },

    #[error("admissible entry ({row}, {col}) is covered by neither block family")]
    Uncovered { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
