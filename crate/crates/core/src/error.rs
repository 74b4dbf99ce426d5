use thiserror::Error;

use crate::algebra::Rat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("zero denominator in literal at position {pos}")]
    ZeroDenominator { pos: usize },

    #[error("variable list mismatch: {left:?} vs {right:?}")]
    VarMismatch { left: Vec<String>, right: Vec<String> },

    #[error("variable `{0}` does not occur with positive degree in both polynomials")]
    EliminationVar(String),

    #[error("non-primitive parametrization: gcd of a and all exponents is {gcd}")]
    NonPrimitive { gcd: u64 },

    #[error("unsupported coordinate frame: {0}")]
    UnsupportedFrame(String),

    #[error("invalid branch: {0}")]
    InvalidBranch(String),

    #[error("branch needs an algebraic coefficient extension: {0}")]
    AlgebraicExtension(String),

    #[error("curve is not unibranch at the origin: {0}")]
    NotUnibranch(String),

    #[error("iteration budget exceeded: {0}")]
    Budget(String),

    #[error("smooth branch not supported here: {0}")]
    SmoothBranch(String),

    #[error("lambda outside klt range [0, {upper})")]
    KltRange { lambda: Box<Rat>, upper: Box<Rat> },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid variable split: {0}")]
    VariableSplit(String),

    #[error("box too small: required {required:?}, have {have:?}")]
    BoxTooSmall { required: Vec<u32>, have: Vec<u32> },

    #[error("invalid ideal family: {0}")]
    InvalidFamily(String),

    #[error("not log Fano: sum of coefficients {0} >= 2")]
    NotLogFano(Rat),

    #[error("invalid cone pair: {0}")]
    InvalidPair(String),

    #[error("family file: {0}")]
    FamilyFile(String),

    #[error("fiber at sample {sample}: {reason}")]
    Fiber { sample: Rat, reason: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    /// Stable machine-readable code for the CLI error line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SYNTAX",
            Error::UnknownVariable { .. } => "UNKNOWN_VARIABLE",
            Error::ZeroDenominator { .. } => "ZERO_DENOMINATOR",
            Error::VarMismatch { .. } => "VAR_MISMATCH",
            Error::EliminationVar(_) => "ELIMINATION_VAR",
            Error::NonPrimitive { .. } => "NON_PRIMITIVE",
            Error::UnsupportedFrame(_) => "UNSUPPORTED_FRAME",
            Error::InvalidBranch(_) => "INVALID_BRANCH",
            Error::AlgebraicExtension(_) => "ALGEBRAIC_EXTENSION",
            Error::NotUnibranch(_) => "NOT_UNIBRANCH",
            Error::Budget(_) => "BUDGET",
            Error::SmoothBranch(_) => "SMOOTH_BRANCH",
            Error::KltRange { .. } => "KLT_RANGE",
            Error::InvalidWeight(_) => "INVALID_WEIGHT",
            Error::VariableSplit(_) => "VARIABLE_SPLIT",
            Error::BoxTooSmall { .. } => "BOX_TOO_SMALL",
            Error::InvalidFamily(_) => "INVALID_FAMILY",
            Error::NotLogFano(_) => "NOT_LOG_FANO",
            Error::InvalidPair(_) => "INVALID_PAIR",
            Error::FamilyFile(_) => "FAMILY_FILE",
            Error::Fiber { .. } => "FIBER",
            Error::Consistency(_) => "CONSISTENCY",
        }
    }
}
