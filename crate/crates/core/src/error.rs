use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{local_dim}^{n_sites} amplitudes exceed the configured capacity of {limit}")]
    Capacity {
        n_sites: usize,
        local_dim: usize,
        limit: usize,
    },
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("site {site} is out of range for a chain of {n_sites} sites")]
    SiteIndex { site: usize, n_sites: usize },
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("level scheme mismatch: {0}")]
    Scheme(&'static str),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("atoms {first} and {second} coincide")]
    SingularGeometry { first: usize, second: usize },
    #[error("numerical failure in {context} (residual {residual:e})")]
    Numerical {
        context: &'static str,
        residual: f64,
    },
    #[error("fit failed: {0}")]
    Fit(&'static str),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
