use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FaberError {
    #[error("invalid spline order {0}: expected m >= {1}")]
    InvalidOrder(i64, i64),

    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),

    #[error("function is not C^{order} at x = {at}; its {order}-th derivative would not be continuous")]
    Smoothness { order: usize, at: String },

    #[error("moment of order {order} equals {value}, expected 0; the Taylor lift would not be compactly supported")]
    NotLiftable { order: usize, value: String },

    #[error("root {root} has modulus within {guard:e} of the unit circle")]
    UnitCircle { root: String, guard: f64 },

    #[error("roots do not form reciprocal pairs (mismatch {mismatch:e})")]
    ReciprocalPairing { mismatch: f64 },

    #[error("residue branches disagree at n = {n}: inside {inside}, outside {outside}")]
    ResidueConsistency { n: i64, inside: f64, outside: f64 },

    #[error("coefficient at level j = {j} needs samples at resolution N >= {needed}, got N = {have}")]
    Resolution { j: i32, needed: i32, have: i32 },

    #[error("samples at resolution N = {have} are coarser than the wavelet knots at level j = {j}")]
    QuadratureResolution { j: i32, have: i32 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl FaberError {
    /// Errors raised by the numerical guards rather than by bad user input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            FaberError::UnitCircle { .. }
                | FaberError::ReciprocalPairing { .. }
                | FaberError::ResidueConsistency { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, FaberError>;
