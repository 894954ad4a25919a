use alloc::string::String;
use core::fmt;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    Parameter(String),
    /// Two objects live on incompatible grids or have mismatched lengths.
    Shape(String),
    /// A NaN / infinity showed up where a finite value is required.
    Numeric(String),
    /// An iterative procedure did not converge (e.g. no shooting bracket).
    Convergence(String),
    /// The requested tolerance cannot be met at the current resolution.
    Resolution(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(m) => write!(f, "parameter error: {m}"),
            Error::Shape(m) => write!(f, "shape error: {m}"),
            Error::Numeric(m) => write!(f, "numeric error: {m}"),
            Error::Convergence(m) => write!(f, "convergence error: {m}"),
            Error::Resolution(m) => write!(f, "resolution error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
