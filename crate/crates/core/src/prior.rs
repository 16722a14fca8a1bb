//! Conditional reference priors and the unnormalized full conditionals the
//! Gibbs sweep samples from.
//!
//! Each parameter's prior, given the other three, is proportional to
//! `sqrt(-d2 l / d theta^2)`. For the rates this is exactly `1/lambda_j`
//! (the log-likelihood holds `m_j ln lambda_j` plus terms linear in
//! `lambda_j`), which makes their full conditionals Gamma distributions:
//! `lambda_j | rest ~ Gamma(m_j, alpha * sum (R_i + 1)(e^{z_i} - 1))`.
//! For `alpha` and `beta` the second derivative is taken by central
//! differences with step [`default_step`].

use crate::error::{Error, Result};
use crate::likelihood::{d2_central, default_step, log_likelihood, ProgressiveSample, ShapeStats};
use crate::model::{Cause, ModelParams, Param};

/// One full conditional: `which` varies, the rest are frozen.
#[derive(Debug, Clone)]
pub struct ConditionalTarget<'a> {
    which: Param,
    frozen: ModelParams,
    data: &'a ProgressiveSample,
    // Only populated for the rates, where (alpha, beta) are fixed.
    stats: Option<ShapeStats>,
}

impl<'a> ConditionalTarget<'a> {
    /// `frozen`'s own value at `which` is ignored.
    pub fn new(which: Param, frozen: ModelParams, data: &'a ProgressiveSample) -> Result<Self> {
        let stats = match which {
            Param::Lambda1 | Param::Lambda2 => {
                let cause = if which == Param::Lambda1 {
                    Cause::One
                } else {
                    Cause::Two
                };
                if data.failures_of(cause) == 0 {
                    return Err(Error::PriorDegenerate(which));
                }
                Some(data.shape_stats(frozen.alpha(), frozen.beta()))
            }
            Param::Alpha | Param::Beta => None,
        };
        Ok(Self {
            which,
            frozen,
            data,
            stats,
        })
    }

    pub fn which(&self) -> Param {
        self.which
    }

    pub fn frozen(&self) -> &ModelParams {
        &self.frozen
    }

    /// Shape and rate of the exact Gamma conditional, for the rate parameters.
    pub fn gamma_conditional(&self) -> Option<(f64, f64)> {
        let stats = self.stats?;
        let shape = match self.which {
            Param::Lambda1 => self.data.m1(),
            _ => self.data.m2(),
        };
        Some((shape as f64, stats.gamma_rate()))
    }

    fn point(&self, value: f64) -> Result<ModelParams> {
        self.frozen.with(self.which, value)
    }

    /// `ln pi(value | rest)` up to an additive constant.
    pub fn log_prior(&self, value: f64) -> Result<f64> {
        let point = self.point(value)?;
        match self.which {
            Param::Lambda1 | Param::Lambda2 => Ok(-value.ln()),
            Param::Alpha | Param::Beta => {
                let center = log_likelihood(&point, self.data, false);
                self.log_prior_from(&point, center)
            }
        }
    }

    fn log_prior_from(&self, point: &ModelParams, center: f64) -> Result<f64> {
        let d2 = d2_central(
            point,
            self.data,
            self.which,
            default_step(point.get(self.which)),
            center,
        )?;
        if -d2 > 0.0 {
            Ok(0.5 * (-d2).ln())
        } else {
            Err(Error::InformationNonpositive {
                param: self.which,
                value: point.get(self.which),
                neg_d2: -d2,
            })
        }
    }

    /// Log-likelihood (no constant) plus log conditional prior.
    pub fn log_posterior(&self, value: f64) -> Result<f64> {
        let point = self.point(value)?;
        match self.stats {
            Some(stats) => {
                Ok(stats.log_likelihood(point.lambda1(), point.lambda2(), self.data) - value.ln())
            }
            None => {
                let center = log_likelihood(&point, self.data, false);
                if center == f64::NEG_INFINITY {
                    return Ok(center);
                }
                Ok(center + self.log_prior_from(&point, center)?)
            }
        }
    }
}

pub fn log_conditional_prior(ct: &ConditionalTarget<'_>, value: f64) -> Result<f64> {
    ct.log_prior(value)
}

pub fn log_conditional_posterior(ct: &ConditionalTarget<'_>, value: f64) -> Result<f64> {
    ct.log_posterior(value)
}
