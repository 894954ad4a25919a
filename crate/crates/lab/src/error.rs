use std::fmt;
use std::io;
use std::path::PathBuf;

/// Failures of the experiment harness. Each maps to a process exit code.
#[derive(Debug)]
pub enum LabError {
    /// Invalid or unreadable configuration.
    Config(String),
    /// A numerical routine reported an error.
    Core(qkg_core::Error),
    /// Filesystem failure, with the path involved.
    Io(PathBuf, io::Error),
    /// A stored file does not follow the expected schema.
    Format(String),
    /// One or more verification checks failed.
    Verification(Vec<String>),
}

pub type LabResult<T> = Result<T, LabError>;

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Verification(_) => 2,
            LabError::Core(qkg_core::Error::Convergence(_)) | LabError::Core(qkg_core::Error::Resolution(_)) => 3,
            LabError::Config(_) | LabError::Core(qkg_core::Error::Parameter(_)) => 4,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> LabError {
        let path = path.into();
        move |e| LabError::Io(path, e)
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Config(m) => write!(f, "configuration error: {m}"),
            LabError::Core(e) => write!(f, "{e}"),
            LabError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            LabError::Format(m) => write!(f, "malformed file: {m}"),
            LabError::Verification(failed) => write!(f, "verification failed: {}", failed.join(", ")),
        }
    }
}

impl std::error::Error for LabError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            LabError::Core(e) => Some(e),
            LabError::Io(_, e) => Some(e),
            _ => None,
        }
    }
}

impl From<qkg_core::Error> for LabError {
    fn from(e: qkg_core::Error) -> Self {
        LabError::Core(e)
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Format(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Format(e.to_string())
    }
}
