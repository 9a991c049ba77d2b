use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate sequence: no nonzero entries in the fit window")]
    DegenerateSequence,

    #[error("below superasymptotic threshold: |z| = {abs_z} must exceed {threshold}")]
    BelowSuperasymptoticThreshold { abs_z: f64, threshold: f64 },

    #[error("degenerate approximant: [{m}/{n}] Padé system is singular")]
    DegenerateApproximant { m: usize, n: usize },

    #[error("ray obstructed: approximant pole at {re}{im:+}i lies within the guard distance of the integration ray")]
    RayObstructed { re: f64, im: f64 },

    /// The quadrature could not push the truncated tail below the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("invalid coefficient sequence: {0}")]
    InvalidSequence(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
