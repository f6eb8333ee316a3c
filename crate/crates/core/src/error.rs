use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a sample needs n >= 2 observations, got {0}")]
    EmptyOrSingleton(usize),

    #[error("negative lifetime {value} at position {index}")]
    NegativeValue { index: usize, value: f64 },

    #[error("non-finite value {value} at position {index}")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("all observations are zero, the sample mean must be positive")]
    AllZero,

    #[error("line {line}: cannot parse {token:?} as a number")]
    Parse { line: usize, token: String },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("unknown scale {0:?}")]
    UnknownScale(String),

    #[error("user scale constant must be positive, got {0}")]
    NonpositiveUserConstant(f64),

    #[error("p must lie in (0,1), got {0}")]
    ProbabilityOutOfRange(f64),

    #[error(
        "precision exhausted: no agreement within {tol:e} up to {max_bits} bits (last gap {gap:e})"
    )]
    PrecisionExhausted { max_bits: usize, tol: f64, gap: f64 },

    #[error("cdf evaluated to {value} with estimated error {error:e}, outside [0, 1]")]
    CdfOutOfRange { value: f64, error: f64 },

    #[error("external table required: {0}")]
    MissingExternalTable(String),

    #[error("external table line {line}: {message}")]
    ExternalTable { line: usize, message: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::PrecisionExhausted { .. } | Error::CdfOutOfRange { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
