use alloc::string::String;
use alloc::vec::Vec;

use crate::Complex;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("unstable system: load {0} is not below 1")]
    Unstable(f64),

    #[error("unknown job-size distribution `{0}`")]
    UnknownDistribution(String),

    /// The characteristic polynomial did not have the expected number of
    /// roots inside the disc `|beta| < alpha`.
    #[error("expected {expected} root(s) with |beta| < alpha, found {}", candidates.len())]
    RootCount { expected: usize, candidates: Vec<Complex> },

    #[error("g+(beta) and g-(beta) coincide; ineg is undefined at a double root")]
    DoubleRoot,

    #[error("singular linear system: {0}")]
    Singular(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("rate profile does not decay: tail ratio {0} >= 1")]
    Divergent(f64),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
