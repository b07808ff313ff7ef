use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input violates a documented precondition.
    InvalidArgument(&'static str),
    /// A time was requested outside the schedule or trajectory domain.
    OutOfDomain { t: f64, start: f64, end: f64 },
    /// A closed-form expression hit a pole.
    Singularity { what: &'static str, t: f64 },
    /// A root could not be bracketed in the search range.
    Calibration(&'static str),
    /// An iterative kernel ran out of budget.
    NonConvergence { what: &'static str, iterations: usize },
    /// The propagated state or the Hamiltonian became non-finite.
    NonFinite { t: f64 },
}

impl Error {
    /// True for errors caused by an iterative method rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Calibration(_) | Error::NonConvergence { .. } | Error::NonFinite { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::OutOfDomain { t, start, end } => {
                write!(f, "time {t} outside domain [{start}, {end}]")
            }
            Error::Singularity { what, t } => write!(f, "singular {what} at t = {t}"),
            Error::Calibration(msg) => write!(f, "calibration failed: {msg}"),
            Error::NonConvergence { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations")
            }
            Error::NonFinite { t } => write!(f, "non-finite value at t = {t}"),
        }
    }
}

impl core::error::Error for Error {}
