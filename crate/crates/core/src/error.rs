use thiserror::Error;

/// Errors raised across the library. CLI exit codes are derived from these.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("unknown event `{event}` in action `{action}`")]
    UnknownEvent { action: String, event: String },

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("malformed structure: {0}")]
    Malformed(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("product update is empty: no world satisfies any precondition")]
    EmptyProduct,

    #[error("action `{0}` is not atemporal")]
    NotAtemporal(String),

    #[error("model is not restricted: {0}")]
    NotRestricted(String),

    #[error("formula contains an update modality")]
    NotActionFree,

    #[error("tableau node limit of {0} exceeded")]
    ResourceExceeded(usize),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("file format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
