use thiserror::Error;

/// Error taxonomy shared by the library and the CLI.
///
/// The categories map onto distinct failure causes: bad configuration,
/// malformed or inconsistent input data, floating-point breakdowns, calls in
/// the wrong lifecycle order, and plain I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("stream format error: {0}")]
    StreamFormat(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("state error: {0}")]
    State(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
