//! Crate-wide error type.
//!
//! Structural misuse (mixing variable registries or operator blocks) panics,
//! since it is a programming error; everything data-dependent is an `Error`.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("denominator vanishes under substitution: {denominator}")]
    DenominatorVanishes { denominator: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot differentiate with respect to parameter `{name}`")]
    ParameterDerivative { name: String },

    #[error("unknown variable `{name}`")]
    UnknownVariable { name: String },

    #[error("duplicate name `{name}`")]
    DuplicateName { name: String },

    #[error("invalid identifier `{name}`")]
    InvalidName { name: String },

    #[error("unknown generator `{name}`")]
    UnknownGenerator { name: String },

    #[error("unsupported divisor: {reason}")]
    UnsupportedDivisor { reason: String },

    #[error("kernel basis not closed: derivative of `{symbol}` by `{var}` uses undeclared symbol `{unknown}`")]
    KernelNotClosed {
        symbol: String,
        var: String,
        unknown: String,
    },

    #[error("mixed partials by `{u}` and `{v}` disagree on kernel symbol `{symbol}`")]
    MixedPartialMismatch { symbol: String, u: String, v: String },

    #[error("wavefunction exchange requires a kernel basis flagged symmetric")]
    KernelNotSymmetric,

    #[error("defining identity {identity} fails; defect: {defect}")]
    IdentityFailure { identity: String, defect: String },

    #[error("ad-powers do not vanish within {max_iter} iterations (last order: {last_order})")]
    AdPowersDiverge { max_iter: u32, last_order: String },

    #[error("order of the dual realization ({dual_order}) disagrees with the ad-vanishing order ({ad_order})")]
    OrderMismatch { dual_order: String, ad_order: u32 },

    #[error("{0}")]
    Validation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown example `{name}`; available: {available}")]
    UnknownExample { name: String, available: String },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Exit-code class of the error: 2 for parse/validation problems.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub type Result<T> = std::result::Result<T, Error>;
