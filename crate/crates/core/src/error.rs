use thiserror::Error;

pub type Result<T, E = TmnlcsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum TmnlcsError {
    /// A nonlinear function was evaluated where it is undefined.
    #[error("function `{label}` is undefined at (n_a={na}, n_b={nb})")]
    FunctionDomain { label: String, na: i64, nb: i64 },

    /// The nonlinear function vanishes on the recursion trajectory.
    #[error("function `{label}` vanishes at rung n={rung}")]
    FunctionZero { label: String, rung: usize },

    #[error("truncation did not converge within {max_n} rungs (last tail ratio {tail:e})")]
    Convergence { max_n: usize, tail: f64 },

    #[error("state norm is zero (below the underflow floor)")]
    ZeroState,

    #[error("charge mismatch: {left} vs {right}")]
    ChargeMismatch { left: u32, right: u32 },

    #[error("operation would produce negative photon-number difference {charge}")]
    ChargeNegative { charge: i64 },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("expression parse error: {0}")]
    Parse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl TmnlcsError {
    /// Stable short name used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::FunctionDomain { .. } => "FunctionDomainError",
            Self::FunctionZero { .. } => "FunctionZeroError",
            Self::Convergence { .. } => "ConvergenceError",
            Self::ZeroState => "ZeroStateError",
            Self::ChargeMismatch { .. } => "ChargeMismatchError",
            Self::ChargeNegative { .. } => "ChargeNegativeError",
            Self::UnknownName(_) => "UnknownNameError",
            Self::Parse(_) => "ParseError",
            Self::InvalidParameter(_) => "InvalidParameterError",
            Self::Schema(_) => "SchemaError",
            Self::Io(_) => "IoError",
            Self::Json(_) => "SchemaError",
            Self::Csv(_) => "IoError",
        }
    }

    /// Process exit code: 2 for domain/convergence failures, 3 for I/O or schema.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) | Self::Json(_) | Self::Csv(_) | Self::Schema(_) => 3,
            _ => 2,
        }
    }
}
