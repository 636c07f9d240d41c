use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dyadic resolution q must be at least 1, got {0}")]
    InvalidResolution(u32),

    #[error("{k} cells do not divide the {cells}-cell fine grid")]
    NotDivisible { k: usize, cells: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("probability argument {0} outside (0, 1)")]
    InvalidProbability(f64),

    #[error("expected jump count {expected:.3e} exceeds the guard {max:.3e}")]
    JumpBudgetExceeded { expected: f64, max: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("fourth Lévy moment {0} outside (0, 1); sweep k manually")]
    MomentOutOfRange(f64),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("numerical guard tripped: {0}")]
    NumericalGuard(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Errors that signal a numerical guard rather than a bad configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::JumpBudgetExceeded { .. } | Error::NumericalGuard(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
