//! Bayesian inference for two-cause competing risks with modified Weibull
//! lifetimes under progressive Type-II censoring.
//!
//! The pipeline: [`simulate`] or [`ingest`] produce a
//! [`ProgressiveSample`](likelihood::ProgressiveSample); [`sampler`] runs a
//! slice-within-Gibbs chain against the conditional reference priors in
//! [`prior`]; [`posterior`] reduces the chain to means, medians and HPD
//! intervals.

pub mod cli;
pub mod error;
pub mod ingest;
pub mod likelihood;
pub mod model;
pub mod par;
pub mod plot;
pub mod posterior;
pub mod prior;
pub mod sampler;
pub mod simulate;
pub mod stats;
pub mod study;

pub use error::{Error, Result};
pub use likelihood::{ProgressiveSample, Record};
pub use model::{Cause, ModelParams, Param, RiskParams};
pub use posterior::PosteriorSummary;
pub use sampler::{Chain, ChainConfig, SliceConfig};
