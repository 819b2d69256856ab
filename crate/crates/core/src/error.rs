use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParams { name: &'static str, reason: String },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("polynomial leading coefficient is zero")]
    LeadingZero,

    #[error("root iteration did not converge (worst relative residual {worst_residual:.3e})")]
    NonConvergence {
        worst_residual: f64,
        roots: Vec<num_complex::Complex64>,
    },

    #[error("roots {i} and {j} coincide within tolerance; expansion coefficients are singular")]
    DegenerateRoots { i: usize, j: usize },

    #[error("non-finite amplitude at t = {t}; a growing branch was selected")]
    OverflowDetected { t: f64 },

    #[error("long-time limit undefined: resolvent denominator vanishes at s = 0")]
    UndefinedLimit,

    #[error("kernel is singular at tau = {0} (requires tau > 0)")]
    SingularAtZero(f64),

    #[error("markovian flat kernel is a delta distribution and has no pointwise value")]
    NotPointwise,

    #[error("s = {0} lies on the kernel branch cut")]
    BranchCut(num_complex::Complex64),

    #[error("step h = {h} exceeds the solver limit {limit}")]
    StepTooLarge { h: f64, limit: f64 },

    #[error("solver produced a non-finite sample at step {step}")]
    NonFinite { step: usize },

    #[error("solver configuration mode does not match the requested solve")]
    ModeMismatch,
}

impl Error {
    /// Stable snake_case identifier, used for machine-readable reporting.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams { .. } => "invalid_params",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::LeadingZero => "leading_zero",
            Error::NonConvergence { .. } => "non_convergence",
            Error::DegenerateRoots { .. } => "degenerate_roots",
            Error::OverflowDetected { .. } => "overflow_detected",
            Error::UndefinedLimit => "undefined_limit",
            Error::SingularAtZero(_) => "singular_at_zero",
            Error::NotPointwise => "not_pointwise",
            Error::BranchCut(_) => "branch_cut",
            Error::StepTooLarge { .. } => "step_too_large",
            Error::NonFinite { .. } => "non_finite",
            Error::ModeMismatch => "mode_mismatch",
        }
    }

    /// True for configuration problems as opposed to numerical failures.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams { .. }
                | Error::InvalidGrid(_)
                | Error::StepTooLarge { .. }
                | Error::ModeMismatch
        )
    }
}
