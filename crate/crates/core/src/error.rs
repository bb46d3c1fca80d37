use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("geometry infeasible: {0}")]
    GeometryInfeasible(String),

    /// A triangular blueprint whose vertex degree is too small for hyperbolic
    /// equilateral triangles. The combinatorial genus is still reported.
    #[error("geometry infeasible: blueprint of degree {degree} is not hyperbolic (combinatorial genus {genus})")]
    FlatBlueprint { degree: usize, genus: i64 },

    #[error("combinatorial error: {0}")]
    Combinatorial(String),

    #[error("construction rule violated: {0}")]
    ConstructionRule(String),

    #[error("surface is disconnected: {0}")]
    Connectivity(String),

    #[error("pairing is not orientable: {0}")]
    Orientability(String),

    #[error("blueprint error: {0}")]
    Blueprint(String),

    #[error("boundary pairing error: {0}")]
    Pairing(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("graph has {vertices} vertices, above the limit of {limit}")]
    SizeExceeded { vertices: usize, limit: usize },

    #[error("parameter regime violated: {0}")]
    ParameterRegime(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn infeasible(msg: impl Into<String>) -> Error {
    Error::GeometryInfeasible(msg.into())
}
