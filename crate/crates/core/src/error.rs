use thiserror::Error;

use crate::qgmap::RegionTag;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("InvalidParameter: {name} ({reason})")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("LevelOutOfRange: level {level} outside 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("HypothesisViolated: {}", .0.join(", "))]
    HypothesisViolated(Vec<String>),

    #[error("NoBracket: no admissible gamma below {cap}")]
    NoBracket { cap: f64 },

    #[error("CatastrophicCancellation: |1 + w/z| = {residual:e}")]
    CatastrophicCancellation { residual: f64 },

    #[error("BeyondMaxLevel: modulus exceeds T_{max_level}")]
    BeyondMaxLevel { max_level: usize },

    #[error("UnorderedRadii: radii fail P_n < Q_n < R_n < S_n < T_n < P_(n+1) at n = {n}")]
    UnorderedRadii { n: usize },

    #[error("OutsideBand: point is not inside {band:?}")]
    OutsideBand { band: RegionTag },

    #[error("DegenerateJacobian: |dG/dw| = {magnitude:e}")]
    DegenerateJacobian { magnitude: f64 },

    #[error("SampleOutsideBand: disk D_{n} leaves ann(Q_n, R_n)")]
    SampleOutsideBand { n: usize },

    #[error("RefinementExhausted: curve needs more than {limit} segments")]
    RefinementExhausted { limit: usize },

    #[error("LevelMismatch: vertex at level {found}, annulus at level {expected}")]
    LevelMismatch { expected: usize, found: usize },

    #[error("NotClosed: winding number needs a closed curve")]
    NotClosed,

    #[error("OutsideAnnulus: log offset {x} not in (0, {width})")]
    OutsideAnnulus { x: f64, width: f64 },

    #[error("InvertedBounds: outer {outer} <= inner {inner}")]
    InvertedBounds { inner: f64, outer: f64 },

    #[error("ParseError: {0}")]
    Parse(String),

    #[error("IoError: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
