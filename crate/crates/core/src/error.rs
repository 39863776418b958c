use thiserror::Error;

/// Errors produced while building, solving or simulating the buffer model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A parameter or configuration violates its domain constraints.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The steady-state solve did not meet its residual tolerance.
    #[error("numerical failure: residual {residual:e} exceeds tolerance {tolerance:e}")]
    Numerical { residual: f64, tolerance: f64 },

    /// Two objects that should share a state space do not.
    #[error("dimension mismatch: expected {expected} states, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A class with positive arrival rate has zero effective throughput.
    #[error("mean delay of the {0} class is undefined (zero admitted throughput)")]
    UndefinedDelay(&'static str),

    /// Both arrival rates are zero, so the cost weighting is undefined.
    #[error("degenerate traffic: lambda_rt + lambda_nrt must be positive")]
    DegenerateTraffic,

    /// A simulation discipline has no analytic generator mode to compare against.
    #[error("pairing error: {0}")]
    Pairing(String),

    /// An error raised at one point of a threshold sweep.
    #[error("at R = {r}: {source}")]
    AtThreshold {
        r: usize,
        #[source]
        source: Box<ModelError>,
    },
}

pub type Result<T> = std::result::Result<T, ModelError>;
