use thiserror::Error;

use crate::model::Param;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: must be finite and > 0")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("empty sample: no failures to infer from")]
    EmptySample,

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("finite-difference step {step} too large for {param} = {value}")]
    StepTooLarge { param: Param, value: f64, step: f64 },

    #[error("non-finite log-likelihood while differentiating in {0}")]
    NonFinite(Param),

    #[error("information nonpositive for {param} at {value} (-d2 = {neg_d2})")]
    InformationNonpositive {
        param: Param,
        value: f64,
        neg_d2: f64,
    },

    #[error("prior degenerate: no failures of the cause governed by {0}")]
    PriorDegenerate(Param),

    #[error("invalid current point {0}: log-density is not finite")]
    InvalidCurrentPoint(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("chain aborted at iteration {iteration}: {source}")]
    ChainAborted {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("empty chain")]
    EmptyChain,

    #[error("missing header")]
    MissingHeader,

    #[error("line {line}: header lacks required column `{name}`")]
    MissingColumn { line: usize, name: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no failures in the prepared data")]
    NoFailures,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that describe a single bad evaluation point rather than a
    /// structural problem. The sampler treats these as log-density -inf.
    pub fn is_pointwise(&self) -> bool {
        matches!(
            self,
            Error::InformationNonpositive { .. } | Error::StepTooLarge { .. } | Error::NonFinite(_)
        )
    }

    /// True for numeric failures of the sampler as opposed to bad input data.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::ChainAborted { source, .. } => !matches!(**source, Error::PriorDegenerate(_)),
            Error::InvalidCurrentPoint(_) | Error::NonFinite(_) => true,
            _ => false,
        }
    }
}
