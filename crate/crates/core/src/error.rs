use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angle is not finite: {0}")]
    InvalidAngle(f64),

    #[error("mean resultant length {resultant:e} is too small for a mean direction")]
    DegenerateResultant { resultant: f64 },

    #[error("circular median is not unique")]
    NonUniqueMedian,

    #[error("Bessel function overflows at x = {x}")]
    Overflow { x: f64 },

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("adaptive quadrature on [{a}, {b}] exceeded the maximum depth")]
    DepthExceeded { a: f64, b: f64 },

    #[error("no sign change on bracket [{low}, {high}]")]
    NoSignChange { low: f64, high: f64 },

    #[error("root finder did not converge in {iterations} iterations")]
    MaxIterExceeded { iterations: usize },

    #[error("dispersion estimate {value} reached its supremum {supremum}")]
    Explosion { value: f64, supremum: f64 },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset `{0}` is not bundled with this build")]
    DatasetUnavailable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command line tool and the C interface.
    pub fn code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::EmptyDataset
            | Error::InvalidAngle(_)
            | Error::InvalidArgument(_)
            | Error::DatasetUnavailable(_) => 2,
            Error::DegenerateResultant { .. }
            | Error::Overflow { .. }
            | Error::OutOfRange { .. }
            | Error::DepthExceeded { .. }
            | Error::NoSignChange { .. }
            | Error::MaxIterExceeded { .. } => 3,
            Error::NonUniqueMedian => 4,
            Error::Explosion { .. } => 5,
            Error::Io(_) => 1,
        }
    }

    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidAngle(_) => "invalid_angle",
            Error::DegenerateResultant { .. } => "degenerate_resultant",
            Error::NonUniqueMedian => "non_unique_median",
            Error::Overflow { .. } => "overflow",
            Error::OutOfRange { .. } => "out_of_range",
            Error::DepthExceeded { .. } => "depth_exceeded",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::MaxIterExceeded { .. } => "max_iter_exceeded",
            Error::Explosion { .. } => "explosion",
            Error::EmptyDataset => "empty_dataset",
            Error::Parse { .. } => "parse",
            Error::DatasetUnavailable(_) => "dataset_unavailable",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
