use thiserror::Error;

/// Errors raised by the numeric and exact paths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("arity error: {0}")]
    Arity(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("division error: {0}")]
    Division(String),

    #[error("adaptive quadrature failed: {0}")]
    Adapt(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("identity `{id}` failed to verify, residual = {residual}")]
    Verification { id: String, residual: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Same error with `ctx` appended to its message.
    pub fn context(self, ctx: &str) -> Error {
        let add = |m: String| format!("{m} [{ctx}]");
        match self {
            Error::Domain(m) => Error::Domain(add(m)),
            Error::Regime(m) => Error::Regime(add(m)),
            Error::Truncation(m) => Error::Truncation(add(m)),
            Error::Arity(m) => Error::Arity(add(m)),
            Error::Index(m) => Error::Index(add(m)),
            Error::Division(m) => Error::Division(add(m)),
            Error::Adapt(m) => Error::Adapt(add(m)),
            Error::Normalization(m) => Error::Normalization(add(m)),
            Error::Size(m) => Error::Size(add(m)),
            Error::Verification { id, residual } => Error::Verification { id: add(id), residual },
        }
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v.abs() < 1.0 {
        Ok(())
    } else {
        domain(format!("{name} = {v} must lie in (-1, 1)"))
    }
}
