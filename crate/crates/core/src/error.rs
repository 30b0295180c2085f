use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient spectral data: index {index} requested, {available} values available")]
    InsufficientSpectralData { index: u64, available: u64 },

    #[error("insufficient sequence data: index {index} requested, {available} values available")]
    InsufficientSequenceData { index: u64, available: u64 },

    #[error("unachievable tolerance {requested:e}: best certified error {achieved:e} after {terms} terms")]
    UnachievableTolerance {
        requested: f64,
        achieved: f64,
        terms: u64,
    },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("log-average route unavailable; use dixmier_residue ({0})")]
    LogAverageUnavailable(String),

    #[error("extrapolation unreliable: raw band [{lo}, {hi}]")]
    ExtrapolationUnreliable { lo: f64, hi: f64 },

    #[error("ill-posed normalized integral: {0}")]
    IllPosedNormalization(String),

    #[error("deformation parameters differ: {0} vs {1}")]
    ThetaMismatch(f64, f64),

    #[error("non-monotone chain: element {index} exceeds its successor at m = {m}")]
    NonMonotoneChain { index: usize, m: u64 },

    #[error("incomparable profile encodings: {0}")]
    IncomparableProfiles(String),

    #[error("unknown {what} '{name}'")]
    Unknown { what: &'static str, name: String },

    #[error("spec error in field '{field}': {message}")]
    Spec { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            field: field.into(),
            message: message.into(),
        }
    }
}
