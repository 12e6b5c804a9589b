use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),

    #[error("invalid window: t_min {t_min} > t_max {t_max}")]
    InvalidWindow { t_min: i64, t_max: i64 },

    #[error("relation {relation} is not homogeneous: {detail}")]
    Inhomogeneous { relation: usize, detail: String },

    #[error("invalid module presentation: {0}")]
    InvalidModule(String),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("d∘d is nonzero at homological degree {s}, entry ({row}, {col})")]
    DSquaredNonzero { s: i64, row: usize, col: usize },

    #[error("not a chain map at homological degree {s}, entry ({row}, {col})")]
    NotAChainMap { s: i64, row: usize, col: usize },

    #[error("rings do not match")]
    RingMismatch,

    #[error("resolution did not close below the degree cap {cap}; syzygies needed through degree {needed}")]
    ResolutionIncomplete { cap: i64, needed: i64 },

    #[error("unsupported (G, K) pair ({group}, {subgroup})")]
    UnsupportedPair { group: String, subgroup: String },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("internal consistency failure: {0}")]
    Internal(String),
}
