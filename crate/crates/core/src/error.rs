use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("unknown benchmark function `{0}` (expected F1..F23)")]
    UnknownFunction(String),

    #[error("objective returned non-finite fitness {value} at position [{}]", fmt_position(.position))]
    NonFiniteFitness { value: f64, position: Vec<f64> },

    #[error("{path}: record {record} (line {line}): {message}")]
    Parse {
        path: String,
        record: u64,
        line: u64,
        message: String,
    },

    #[error("{0}")]
    Io(String),

    #[error("optimizer `{algorithm}` failed: {message}")]
    Plugin { algorithm: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

fn fmt_position(position: &[f64]) -> String {
    position
        .iter()
        .map(|x| format!("{x:e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
