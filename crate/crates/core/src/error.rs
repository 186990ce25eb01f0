use std::fmt;

use thiserror::Error;

/// A single violated parameter invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub value: f64,
    pub requirement: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} (must be {})", self.field, self.value, self.requirement)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    InvalidParams(Vec<Violation>),

    #[error("parameter domain error: {0}")]
    Domain(String),

    #[error("no steady state: {0}")]
    NoSteadyState(String),

    #[error("singular amplitude: {0}")]
    Singular(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("integration diverged at t = {t:e} s (norm {norm:e}); try a smaller step")]
    Integration { t: f64, norm: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("no stable operating point on the phase grid")]
    NoStablePoint,
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
