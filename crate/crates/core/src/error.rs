use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("element `{element}` is not valid for this {kind} group")]
    InvalidElement { element: String, kind: &'static str },

    #[error("resource cap exceeded: {what} needs {needed} items, cap is {cap}")]
    ResourceCap {
        what: String,
        needed: u128,
        cap: usize,
    },

    #[error("the Hochschild boundary is undefined on degree-0 chains")]
    DegreeZero,

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("degree {degree} out of range (available: {available})")]
    DegreeOutOfRange { degree: usize, available: String },

    #[error("{0} is not supported for this group kind")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cochain `{0}` is not normalized")]
    NotNormalized(String),

    #[error("cover radius {cover} is below the support radius {needed} of the chain")]
    CoverRadiusTooSmall { cover: u64, needed: u64 },

    #[error("truncated complex is not a chain complex: {0}")]
    NotAComplex(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
