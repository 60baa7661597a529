use thiserror::Error;

use tipc::capacity::CapacityError;
use tipc::distributions::DistributionError;
use tipc::narma_analysis::AnalysisError;
use tipc::polychaos::PolyError;
use tipc::systems::SystemError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    /// 2 config, 3 data, 4 numeric or divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

impl From<CapacityError> for CliError {
    fn from(e: CapacityError) -> Self {
        match e {
            CapacityError::Poly(p) => p.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Degenerate { .. } | PolyError::DegenerateTarget { .. } => CliError::Numeric(e.to_string()),
            PolyError::Window { .. } => CliError::Data(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<SystemError> for CliError {
    fn from(e: SystemError) -> Self {
        match e {
            SystemError::Divergence { .. } => CliError::Numeric(e.to_string()),
            SystemError::State(c) => c.into(),
            SystemError::InvalidParameter { .. } | SystemError::InputTooShort { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::System(s) => s.into(),
            AnalysisError::NoFixedPoint { .. } | AnalysisError::Divergence { .. } => CliError::Numeric(e.to_string()),
            AnalysisError::InvalidParameter { .. } | AnalysisError::InputTooShort { .. } => {
                CliError::Config(e.to_string())
            }
        }
    }
}

impl From<DistributionError> for CliError {
    fn from(e: DistributionError) -> Self {
        CliError::Config(e.to_string())
    }
}
