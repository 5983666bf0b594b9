use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Broad classes used by front ends to map failures onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Caller supplied an argument outside the operation's domain.
    Config,
    /// Input data is malformed, inconsistent or insufficient.
    Data,
    /// A numerical procedure failed on otherwise valid input.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("bad magic {found:?}, expected {expected:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid header: {0}")]
    InvalidHeader(&'static str),
    #[error("payload length mismatch: expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("insufficient data: need at least {needed}, have {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("clip of {clip_seconds} s is shorter than the {window_seconds} s window")]
    Unframeable {
        clip_seconds: f64,
        window_seconds: f64,
    },
    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("matrix is indefinite: eigenvalue {eigenvalue:e} against largest {largest:e}")]
    Indefinite { eigenvalue: f64, largest: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("negative Fréchet distance {0:e}")]
    NegativeDistance(f64),
    #[error("inverse of a zero FAD is undefined")]
    UndefinedInverse,
    #[error("correlation undefined: {0} has zero rank variance")]
    UndefinedCorrelation(&'static str),
    #[error("no FAD value for system {system:?}, category {category:?}")]
    MissingFad { system: String, category: String },
    #[error("no rating for system {system:?}, category {category:?}")]
    MissingRating { system: String, category: String },
    #[error("duplicate entry for system {system:?}, category {category:?}")]
    DuplicatePair { system: String, category: String },
    #[error("invalid distance matrix: {0}")]
    InvalidDistances(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Indefinite { .. }
            | Error::NoConvergence
            | Error::NegativeDistance(_)
            | Error::UndefinedInverse
            | Error::UndefinedCorrelation(_) => ErrorClass::Numerical,
            Error::InvalidArgument(_) => ErrorClass::Config,
            _ => ErrorClass::Data,
        }
    }
}
