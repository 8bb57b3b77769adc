use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("lattice mismatch: operands live on different lattices")]
    LatticeMismatch,
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("modulus mismatch: Z/{0} vs Z/{1}")]
    ModulusMismatch(i64, i64),
    #[error("not collinear: exponents do not lie on one direction")]
    NotCollinear,
    #[error("inexact division")]
    InexactDivision,
    #[error("division by the zero kernel")]
    DivisionByZero,
    #[error("twist undefined: c^2 + k.c is odd for class {0}")]
    OddTwist(String),
    #[error("non-integral value: {0}")]
    NonIntegral(String),
    #[error("configuration is not taut: {0}")]
    NotTaut(String),
    #[error("non-integral extension: {0}")]
    NonIntegralExtension(String),
    #[error("class {0} is not orthogonal to {1}")]
    NonOrthogonal(String, String),
    #[error("key collision at {0}")]
    Collision(String),
    #[error("sphere relation precondition failed: {0}")]
    SphereRelation(String),
    #[error("class {0} is not characteristic")]
    NotCharacteristic(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0}")]
    Semantic(String),
    #[error("empty search set")]
    EmptySearch,
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
