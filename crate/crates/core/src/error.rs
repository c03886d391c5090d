use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or model specification is internally inconsistent.
    #[error("specification error: {0}")]
    Spec(String),

    /// A call-site argument is out of its admissible range.
    #[error("argument error: {0}")]
    Argument(String),

    /// Input data contains values the method cannot use (NaN, inf, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A model was evaluated outside its domain.
    #[error("domain error in {model}: {msg}")]
    Domain { model: String, msg: String },

    /// Data is degenerate for the requested statistic (zero variance, singular correlation).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("linear algebra error: {0}")]
    LinearAlgebra(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    /// A model failure while propagating a sample, tagged with the row index.
    #[error("model failed on sample {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(model: &str, msg: impl Into<String>) -> Self {
        Error::Domain {
            model: model.to_string(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
