use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {func} at {at}")]
    Pole { func: &'static str, at: String },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what} did not converge within {cap} terms")]
    NonConvergence { what: &'static str, cap: usize },
    #[error("accuracy target missed: {0}")]
    Accuracy(String),
    #[error("tolerance not met: error {err:.3e} exceeds {target:.3e}")]
    ToleranceNotMet { err: f64, target: f64 },
    #[error("extrapolation increments are not decreasing ({0})")]
    Extrapolation(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("gamma = {gamma} is outside the covered range (gamma_4 = {gamma4})")]
    OutOfRange { gamma: f64, gamma4: f64 },
    #[error("no feasible grid point")]
    Infeasible,
}

pub type Result<T> = std::result::Result<T, Error>;
