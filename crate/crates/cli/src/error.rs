use indstab::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 invalid input, 3 numerical failure, 4 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 4,
            CliError::Core(e) => match e {
                Error::InvalidInput(_) | Error::SizeLimit { .. } | Error::Parse { .. } => 2,
                Error::NoConvergence { .. }
                | Error::NonFinite { .. }
                | Error::ZeroOnContour { .. }
                | Error::RefinementDepth { .. }
                | Error::Consistency(_) => 3,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
