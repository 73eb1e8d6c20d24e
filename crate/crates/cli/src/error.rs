use multipop_core::network::ValidationReport;
use multipop_core::Error;

/// Process exit status, one per outcome class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    /// The command succeeded and the requested property holds.
    Ok = 0,
    /// A predicate, validation or hypothesis check failed.
    Failed = 1,
    /// Unreadable or malformed input, bad usage, dimension mismatch.
    Input = 2,
    /// The solver did not reach a verified equilibrium.
    Unsolved = 3,
    /// Non-monotone costs without `--allow-nonmonotone`.
    NonMonotone = 4,
    /// Grid larger than the budget.
    Budget = 5,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },

    #[error("{0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{path}: invalid network")]
    Invalid { path: String, report: ValidationReport },

    #[error("{0}")]
    Gamma(String),

    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Input(_) | CliError::Dimension(_) => Exit::Input,
            CliError::Invalid { .. } | CliError::Gamma(_) => Exit::Failed,
            CliError::Core(e) => match e {
                Error::NonMonotone { .. } => Exit::NonMonotone,
                Error::BudgetExceeded { .. } => Exit::Budget,
                Error::NoEquilibrium | Error::Unsolved(_) | Error::DegenerateNormalization(_) => Exit::Unsolved,
                Error::ConditionGamma { .. } | Error::NotNash(_) | Error::InvalidNetwork(_) => Exit::Failed,
                _ => Exit::Input,
            },
        }
    }
}
