use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A model or function parameter is outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// A trial or scenario is internally inconsistent (weights, n/d, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// The closed-form path was asked for a model it does not cover.
    #[error("unsupported model: {0}")]
    UnsupportedModel(&'static str),

    /// An iterative numeric routine did not meet its tolerance.
    #[error("{what} did not converge (last estimate {estimate:e}, error {error:e})")]
    Numeric {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_positive(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

pub(crate) fn check_probability(name: &'static str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::param(name, format!("must lie in [0, 1], got {v}")))
    }
}
