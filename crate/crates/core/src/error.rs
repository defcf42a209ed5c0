use thiserror::Error;

/// Errors surfaced by channel construction, beamforming and the optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate geometry: {a} and {b} are {distance:.3} m apart (minimum 0.1 m)")]
    DegenerateGeometry {
        a: &'static str,
        b: &'static str,
        distance: f64,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("channel vector has zero norm")]
    ZeroChannel,

    /// No beamformer within the power budget reaches the SNR threshold.
    #[error("infeasible: required {required:.6e} exceeds achievable {achievable:.6e}")]
    Infeasible { required: f64, achievable: f64 },

    #[error("sensing and communication channels are parallel; span is one-dimensional")]
    DegenerateSpan,

    #[error("per-element objective is constant in the phase")]
    DegenerateObjective,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
