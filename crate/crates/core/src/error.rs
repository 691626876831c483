use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument fell outside the domain of the operation.
    #[error("{name} = {value} is out of domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The squeezing asks for more photons than the probe carries.
    #[error("photon budget violated: squeezing r = {r} costs {squeezing} photons, budget is {budget}")]
    BudgetViolation { r: f64, budget: f64, squeezing: f64 },

    /// A scenario file or command-line input failed to parse or validate.
    #[error("{0}")]
    Invalid(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain { .. } | Error::BudgetViolation { .. } => ErrorKind::Numerical,
            Error::Invalid(_) | Error::Io { .. } => ErrorKind::Validation,
        }
    }
}

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain { name, value, expected }
}
