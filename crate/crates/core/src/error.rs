use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("reaction term violates its assumptions: {0}")]
    AssumptionViolation(String),

    /// Bistable nonlinearity with vanishing integral over [0, 1].
    #[error("balanced nonlinearity: integral of f over [0,1] is {integral:e}, no case C1-C4 applies")]
    Balanced { integral: f64 },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("no traveling front with speed {requested}: minimal speed is {c_min}")]
    NoFront { requested: f64, c_min: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("tail fit failure: {0}")]
    FitFailure(String),

    #[error("numerical instability at t = {t}: {reason}")]
    Instability { t: f64, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("construction failure: {0}")]
    Construction(String),

    #[error("property failure: {0}")]
    Property(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
