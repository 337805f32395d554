use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrientError {
    #[error("invalid basis: m = {m}, j_max = {j_max} (need j_max >= |m| + 1)")]
    InvalidBasis { m: i32, j_max: u32 },

    #[error("basis mismatch: state (m = {state_m}, j_max = {state_jmax}) vs operator (m = {op_m}, j_max = {op_jmax})")]
    BasisMismatch {
        state_m: i32,
        state_jmax: u32,
        op_m: i32,
        op_jmax: u32,
    },

    #[error("eigendecomposition did not converge for operator [{fingerprint}]")]
    NoConvergence { fingerprint: String },

    #[error("truncation insufficient: tail population {tail:.3e} at j_max = {j_max}")]
    TruncationInsufficient { j_max: u32, tail: f64 },

    #[error("finite-pulse integration unstable: norm drift {drift:.3e} after {steps} steps (dt = {dt:.3e})")]
    Unstable { drift: f64, steps: usize, dt: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl OrientError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        OrientError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            OrientError::NoConvergence { .. }
                | OrientError::TruncationInsufficient { .. }
                | OrientError::Unstable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, OrientError>;
