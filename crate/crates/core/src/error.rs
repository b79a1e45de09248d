use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A caller-supplied value violates an operation's precondition.
    #[error("argument error: {0}")]
    Argument(String),
    /// A text document or table entry is malformed.
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
    /// A truncation bound (arity, polynomial degree) is too small for the request.
    #[error("capacity error: {what} needs {needed}, limit is {limit}")]
    Capacity {
        what: String,
        needed: usize,
        limit: usize,
    },
}

impl Error {
    pub fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            msg: msg.into(),
        }
    }
}
