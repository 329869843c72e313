use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),

    #[error("invalid age weights: {0}")]
    InvalidAgeWeights(String),

    #[error("invalid action probabilities: {0}")]
    InvalidActionWeights(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid delivery log: {0}")]
    InvalidDeliveryLog(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    /// A closed form is evaluated on a parameter set where one of its
    /// denominators vanishes and no reduced branch applies.
    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    /// The user is never served, so its age grows without bound.
    #[error("user {0} is never served; age diverges")]
    NeverServed(u8),

    #[error("config parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the CLI: 3 for I/O, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
