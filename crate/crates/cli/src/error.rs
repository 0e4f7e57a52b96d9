use std::fmt;

/// Failure categories, each with its own process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
    /// The reader of stdout went away, as with `ladderfl g2 | head`.
    ClosedOutput,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
            CliError::ClosedOutput => 0,
        }
    }

    /// Prefixes the message with where it happened.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
            CliError::ClosedOutput => CliError::ClosedOutput,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::ClosedOutput => write!(f, "output closed"),
        }
    }
}

impl From<ladderfl::Error> for CliError {
    fn from(e: ladderfl::Error) -> Self {
        use ladderfl::Error::*;
        match e {
            InvalidParameter { .. } | UnknownModel(_) | UnsupportedKind(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError::ClosedOutput;
        }
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if let csv::ErrorKind::Io(io) = e.kind() {
            if io.kind() == std::io::ErrorKind::BrokenPipe {
                return CliError::ClosedOutput;
            }
        }
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
