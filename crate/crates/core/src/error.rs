use thiserror::Error;

/// Errors produced by the packing, covering and circle pipelines.
#[derive(Debug, Error)]
pub enum Error {
    /// A gauge was evaluated outside its domain `[0, domain_max]`.
    #[error("gauge argument {x} outside domain [0, {domain_max}]")]
    GaugeDomain { x: f64, domain_max: f64 },

    /// Construction of a gauge failed (non-monotone table, regularity failure, ...).
    #[error("invalid gauge: {0}")]
    InvalidGauge(String),

    /// An input value or structure violated a documented precondition.
    #[error("{0}")]
    Validation(String),

    /// Two cell fields disagree on dimension or depth.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An evaluation point is too close to the unit circle for the grid resolution.
    #[error("|z| = {modulus} exceeds the resolution limit {limit} for grid size {grid}")]
    Resolution {
        modulus: f64,
        limit: f64,
        grid: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }
}
