use thiserror::Error;

/// Errors raised by the equilibrium, tail and oracle computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {what} requires {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: String,
        value: f64,
    },

    #[error(
        "MRS solver did not converge after {iterations} iterations \
         (a = {a}, b = {b}, residuals = [{r0:e}, {r1:e}])"
    )]
    Solver {
        iterations: usize,
        a: f64,
        b: f64,
        r0: f64,
        r1: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, requirement: impl Into<String>, value: f64) -> Self {
        Error::Domain {
            what,
            requirement: requirement.into(),
            value,
        }
    }
}
