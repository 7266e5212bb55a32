use thiserror::Error;

/// Errors raised by the valuation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid contract specification: {0}")]
    InvalidSpec(String),

    #[error("mortgage rate {m} must exceed the risk-free rate {r}")]
    NegativeSpread { m: f64, r: f64 },

    #[error("time {t} outside [0, {maturity}]")]
    InvalidTime { t: f64, maturity: f64 },

    #[error("root is not bracketed on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge within {0} iterations")]
    MaxIterExceeded(usize),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("foreclosure cost {0} outside [0, 1)")]
    InvalidPhi(f64),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid stopping thresholds: {0}")]
    InvalidThresholds(String),

    #[error("invalid simulation setup: {0}")]
    InvalidHorizon(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("projected relaxation did not converge after {sweeps} sweeps (last update {last_update:e})")]
    NotConverged { sweeps: usize, last_update: f64 },

    /// A bracket-end sign pattern or monotonicity assumption failed at runtime.
    #[error("diagnostic: {0}")]
    Diagnostic(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI error payload.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::NegativeSpread { .. } => "NegativeSpread",
            Error::InvalidTime { .. } => "InvalidTime",
            Error::NoBracket { .. } => "NoBracket",
            Error::MaxIterExceeded(_) => "MaxIterExceeded",
            Error::UnsupportedRegime(_) => "UnsupportedRegime",
            Error::InvalidPhi(_) => "InvalidPhi",
            Error::Degenerate(_) => "Degenerate",
            Error::InvalidThresholds(_) => "InvalidThresholds",
            Error::InvalidHorizon(_) => "InvalidHorizon",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::NotConverged { .. } => "NotConverged",
            Error::Diagnostic(_) => "Diagnostic",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
