use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside the domain of {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function} has no solution: {detail}")]
    NoSolution {
        function: &'static str,
        detail: String,
    },

    /// psi and the SS2/SS3 thresholds only exist when omega < 1.
    #[error("omega = {omega} >= 1, the hydrogen-free branch does not exist")]
    OmegaRegime { omega: f64 },

    #[error("{operation} requires zero decay rates (got a = {decay:?})")]
    WrongMethod {
        operation: &'static str,
        decay: [f64; 3],
    },

    #[error("growth assumption {assumption} violated: {detail}")]
    AssumptionViolation {
        assumption: &'static str,
        detail: String,
    },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("step size underflow at t = {t}: h = {h:e}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn no_solution(function: &'static str, detail: impl Into<String>) -> Self {
        Error::NoSolution {
            function,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerical machinery itself rather than of the inputs.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(
            self,
            Error::EigenNoConvergence { .. } | Error::StepUnderflow { .. } | Error::Numeric(_)
        )
    }
}
