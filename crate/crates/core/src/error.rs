use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a function.
    #[error("domain error in {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// Survival probability underflowed in the far tail.
    #[error("survival underflow at t = {0}")]
    TailUnderflow(f64),

    #[error("series for {what} did not converge after {terms} terms")]
    SeriesDivergence { what: &'static str, terms: usize },

    #[error("series for {what} lost {digits:.1} digits to cancellation")]
    Cancellation { what: &'static str, digits: f64 },

    #[error("quadrature did not reach tolerance (estimate {value}, error {abs_error})")]
    Quadrature { value: f64, abs_error: f64 },

    #[error("invalid dataset: {0}")]
    Dataset(String),

    /// A parse problem in an input file, tagged with its 1-based line number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("optimizer failure: {0}")]
    Optimizer(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
