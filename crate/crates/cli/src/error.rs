use std::fmt;

use pgnl::Error;

/// Everything that ends a command unsuccessfully, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    /// A computed result disagreed with its reference.
    Mismatch(String),
    Usage(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 4,
            CliError::Lib(e) => match e {
                Error::Parse(_) | Error::NotPrime(_) => 2,
                Error::Domain(_)
                | Error::LeafNode(_)
                | Error::UniversalInput(_)
                | Error::OddPrimeBlocks(_)
                | Error::ZeroTargetUnbounded
                | Error::RankTooSmall(_) => 3,
                Error::Io(_) => 4,
                Error::ResourceLimit(_) | Error::BudgetExceeded(_) | Error::NonStabilized(_) => 5,
                Error::Consistency(_) => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Mismatch(s) | CliError::Usage(s) => write!(f, "{s}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => CliError::Io(io),
            e => CliError::Lib(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Usage(format!("malformed CSV: {other:?}")),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}
