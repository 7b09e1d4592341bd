use crate::distributions::DistributionKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain too small: {0}")]
    DomainTooSmall(String),

    #[error("degenerate normalization for {kind} distribution (integral = {value:e})")]
    DegenerateNormalization { kind: DistributionKind, value: f64 },

    #[error("flight-time map undefined: detector coincides with the packet centre")]
    UndefinedMap,

    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
