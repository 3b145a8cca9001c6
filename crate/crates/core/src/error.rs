use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },

    #[error("{line}:{col}: undeclared identifier `{name}`")]
    UndeclaredIdentifier { name: String, line: usize, col: usize },

    #[error("invalid model: {}", .0.join("; "))]
    InvalidModel(Vec<String>),

    #[error("polynomials over {left} and {right} variables cannot be combined")]
    VariableMismatch { left: usize, right: usize },

    #[error("shift {shift} leaves negative power s^{}", .min_power + .shift)]
    ShiftTooSmall { min_power: i32, shift: i32 },

    #[error("the model has a nonzero deterministic input; the spectral method assumes a centred stationary model, use the kalman method instead")]
    NonzeroInput,

    #[error("method `{method}` cannot be applied: {reason}")]
    MethodMismatch { method: String, reason: String },

    #[error("empty sampling range for `{name}`")]
    DegenerateRange { name: String },

    #[error("candidate `{candidate}`: {reason}")]
    Candidate { candidate: String, reason: String },

    #[error("innovation covariance is singular at step {step}")]
    SingularInnovation { step: usize },

    #[error("filter diverged at step {step}: {reason}")]
    FilterDivergence { step: usize, reason: String },

    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("{0}")]
    DivisionByZero(String),

    #[error("{0}")]
    Invalid(String),
}
