use esncache_core::data::DataError;
use esncache_core::SimError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Trace { path: String, source: DataError },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// The message without the variant prefix.
    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) => m.clone(),
            other => other.to_string(),
        }
    }

    /// 2 for bad configuration or input files, 3 when the oracle refuses an
    /// instance, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Trace { .. } => 2,
            CliError::Sim(SimError::OracleTooLarge { .. }) => 3,
            CliError::Sim(SimError::Config(_) | SimError::Trace(_)) => 2,
            CliError::Sim(_) | CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}
