use thiserror::Error;

/// An argument outside the domain of a model formula.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),
    #[error("cluster count must be at least 1")]
    ZeroClusters,
    #[error("node count must be at least 1")]
    NoNodes,
    #[error("{what} must be strictly positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("probability must lie in (0, 1], got {0}")]
    Probability(f64),
    #[error("series is empty")]
    EmptySeries,
}

/// A configuration that cannot be loaded or violates an invariant.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown key `{key}`; valid keys: {}", valid.join(", "))]
    UnknownKey {
        key: String,
        valid: Vec<&'static str>,
    },
    #[error("`{key}`: cannot parse `{value}`: {reason}")]
    Parse {
        key: String,
        value: String,
        reason: String,
    },
    #[error("`{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("line {line}: expected `key=value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("configs differ in `{key}`; compared runs must share everything but the strategy")]
    Mismatch { key: &'static str },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    pub(crate) fn invalid(key: &str, reason: impl Into<String>) -> Self {
        Self::Invalid {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

/// Failure while running a simulation or writing its outputs.
#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
