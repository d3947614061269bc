use thiserror::Error;

use crate::ring::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("line {line}: {message}")]
    Dsl { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Budget exhaustion; never a statement about the mathematics.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("colength is not finite: {0}")]
    NotFiniteColength(String),

    #[error("critical point is not isolated")]
    NotIsolated,

    #[error("not an ICIS: {0}")]
    NotIcis(String),

    #[error("generic value unstable ({0}); re-run with more draws or another seed")]
    GenericityUnstable(String),

    #[error("negative Segre number s^{index}; internal consistency failure")]
    NegativeSegre { index: usize },

    #[error("arc does not lie on the germ: {0}")]
    ArcNotOnGerm(String),

    #[error("inconclusive at truncation order {0}")]
    Inconclusive(u32),

    #[error("coefficient {0} is not defined in the prime field")]
    BadReduction(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
