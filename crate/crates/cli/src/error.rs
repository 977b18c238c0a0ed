use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: String,
        source: std::io::Error,
    },

    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config is missing required key `{key}` in [{section}]")]
    MissingKey { section: String, key: String },

    #[error("config line {line}: invalid value for `{key}`: {message}")]
    InvalidValue {
        line: usize,
        key: String,
        message: String,
    },

    #[error("no config file given; pass --config PATH")]
    NoConfig,

    #[error(transparent)]
    Model(#[from] mcvd::Error),

    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ReadConfig { .. }
            | CliError::Parse { .. }
            | CliError::MissingKey { .. }
            | CliError::InvalidValue { .. }
            | CliError::NoConfig => 2,
            CliError::Model(_) | CliError::Io(_) => 1,
        }
    }
}
