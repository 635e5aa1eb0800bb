use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid graph file: {0}")]
    Parse(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("graph has no {0} arrows")]
    NoArrows(String),
    #[error("multiplicities of {0} are not positive integers")]
    NonIntegralMultiplicities(String),
    #[error("intersection matrix is not negative definite")]
    NotNegativeDefinite,
    #[error("cycle has a negative coefficient")]
    NotEffective,
    #[error("unknown blowup site: {0}")]
    UnknownSite(String),
    #[error("inconsistent blowup state: {0}")]
    InconsistentState(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("value out of machine range: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
