use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {0} is not in the first-level stabilizer")]
    NotInStabilizer(String),
    #[error("could not parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("order of {element} not found within 2^{cap}")]
    OrderCapExceeded { element: String, cap: u32 },
    #[error("missing value for variable {0}")]
    MissingAssignment(String),
    #[error("word is not quadratic: {0}")]
    NotQuadratic(String),
    #[error("cannot join on {var}: {reason}")]
    Join { var: String, reason: String },
    #[error("constraint precondition failed: {0}")]
    Constraint(String),
    #[error("splitting precondition failed: {0}")]
    Split(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
