use thiserror::Error;

/// Failures of the command-line front end.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config file, override or command-line value.
    #[error("config error: {0}")]
    Config(String),
    /// A CSV handed to the plotter does not have the sweep layout.
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Numerical(#[from] locfield::Error),
    /// The sweep finished and was written, but some points carry errors.
    #[error("{failed} of {total} sweep points failed; see the `error` column")]
    PointErrors { failed: usize, total: usize },
}

impl CliError {
    /// 3 for numerical failures; everything traceable to the request,
    /// including unreadable inputs and unwritable outputs, is 2.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(e) if !e.is_config() => 3,
            CliError::PointErrors { .. } => 3,
            _ => 2,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Format(format!("{other:?}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
