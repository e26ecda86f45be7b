use thiserror::Error;

/// Errors raised by the element kernels, the model layer and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("singular load interpolation matrix: {0}")]
    DegenerateLoadInterpolation(String),

    #[error("element interpolation failure (condition estimate {condition:.3e}): {reason}")]
    InterpolationFailure { condition: f64, reason: String },

    #[error("singular element flexibility matrix (rank {rank} of {size}): {reason}")]
    SingularElement {
        rank: usize,
        size: usize,
        reason: String,
    },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("singular system at equation {pivot}: {hint}")]
    SingularSystem { pivot: usize, hint: String },

    #[error("mass matrix is not positive definite at equation {pivot}")]
    MassMatrix { pivot: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for FemError {
    fn from(err: std::io::Error) -> Self {
        FemError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FemError>;

impl FemError {
    /// Prefixes the message with `context`, keeping the variant.
    pub fn context(self, context: &str) -> FemError {
        let pre = |m: String| format!("{context}: {m}");
        match self {
            FemError::InvalidArgument(m) => FemError::InvalidArgument(pre(m)),
            FemError::DegenerateGeometry(m) => FemError::DegenerateGeometry(pre(m)),
            FemError::DegenerateLoadInterpolation(m) => FemError::DegenerateLoadInterpolation(pre(m)),
            FemError::InterpolationFailure { condition, reason } => FemError::InterpolationFailure {
                condition,
                reason: pre(reason),
            },
            FemError::SingularElement { rank, size, reason } => FemError::SingularElement {
                rank,
                size,
                reason: pre(reason),
            },
            FemError::InvalidFrame(m) => FemError::InvalidFrame(pre(m)),
            FemError::InvalidModel(m) => FemError::InvalidModel(pre(m)),
            FemError::SingularSystem { pivot, hint } => FemError::SingularSystem { pivot, hint: pre(hint) },
            FemError::MassMatrix { pivot } => FemError::MassMatrix { pivot },
            FemError::Parse(m) => FemError::Parse(pre(m)),
            FemError::Io(m) => FemError::Io(pre(m)),
        }
    }

    /// Process exit code of the command-line tool: 2 for bad input, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            FemError::InvalidArgument(_)
            | FemError::DegenerateGeometry(_)
            | FemError::InvalidFrame(_)
            | FemError::InvalidModel(_)
            | FemError::Parse(_)
            | FemError::Io(_) => 2,
            FemError::DegenerateLoadInterpolation(_)
            | FemError::InterpolationFailure { .. }
            | FemError::SingularElement { .. }
            | FemError::SingularSystem { .. }
            | FemError::MassMatrix { .. } => 3,
        }
    }
}
