use thiserror::Error;

/// Errors produced by diagram construction, parsing, serialization and the
/// verification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("endpoint {index} is invalid: {reason}")]
    BadEndpoint { index: usize, reason: String },

    #[error("flavor mismatch: expected {expected}, got {got}")]
    FlavorMismatch { expected: String, got: String },

    #[error("skeleton mismatch: expected {expected}, got {got}")]
    SkeletonMismatch { expected: String, got: String },

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("schema violation at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("order {requested} exceeds the enumeration ceiling {ceiling}")]
    ResourceLimit { requested: usize, ceiling: usize },

    #[error("move not applicable: {0}")]
    MovePrecondition(String),

    #[error("unsupported flavor: {0}")]
    UnsupportedFlavor(String),

    #[error("relation convention mismatch: {message}; offending instance: {instance}")]
    ConventionMismatch { message: String, instance: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
