use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range 1..={len}")]
    Index { index: usize, len: usize },

    /// The signal's unresolved tail is too heavy for the oracle to be computed
    /// over its materialized coefficients.
    #[error(
        "oracle horizon insufficient: tail_energy {tail_energy:e} exceeds tau*eps^2 = {budget:e}; \
         extend the signal to at least {suggested_len} coefficients"
    )]
    HorizonInsufficient {
        tail_energy: f64,
        budget: f64,
        suggested_len: usize,
    },

    /// A theorem hypothesis or configuration inequality does not hold.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
