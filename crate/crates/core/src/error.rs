use thiserror::Error;

/// Errors raised by the library. Variants map onto "invalid input" versus
/// "numeric domain" failures so callers can pick an exit status.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {point:?} is outside the admissible range {range}")]
    OutOfRange { point: (usize, usize), range: String },

    #[error("horizon {given} too small: tail mass below tolerance needs at least {required}")]
    HorizonTooSmall { given: usize, required: usize },

    #[error("moment generating function diverges at beta = {beta} (beta0 = {beta0})")]
    Divergence { beta: f64, beta0: f64 },

    #[error("unsupported combination: {0}")]
    Unsupported(String),

    #[error("rejection sampler exhausted its budget of {attempts} attempts")]
    RejectionBudget { attempts: usize },

    #[error("enumeration of size {size} exceeds the cap {cap}")]
    EnumerationCap { size: f64, cap: f64 },

    #[error("numeric domain error: {0}")]
    Domain(String),

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("fit quality: {0}")]
    FitQuality(String),
}

impl Error {
    /// True for errors caused by the numeric regime (divergent moments,
    /// exhausted samplers, failed searches) rather than malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Divergence { .. }
                | Error::RejectionBudget { .. }
                | Error::Domain(_)
                | Error::SearchFailed(_)
                | Error::FitQuality(_)
                | Error::HorizonTooSmall { .. }
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
