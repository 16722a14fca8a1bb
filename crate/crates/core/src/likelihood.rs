//! Log-likelihood of progressively Type-II censored two-cause data.
//!
//! With `m` failures at `t_1 < ... < t_m`, removals `R_i`, `m1` failures of
//! cause 1 and `z_i = (t_i/alpha)^beta`, the log-likelihood is
//!
//! ```text
//! l = m1 ln l1 + (m - m1) ln l2 + m ln beta + sum z_i + (beta - 1) sum ln(t_i/alpha)
//!     + (l1 + l2) alpha sum (R_i + 1)(1 - e^{z_i})
//! ```
//!
//! plus the parameter-free combinatorial constant
//! `ln n + ln(n - R_1 - 1) + ... + ln(n - R_1 - ... - R_{m-1} - m + 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Cause, ModelParams, Param, EXP_CLAMP};

/// One observed failure `(t_i, cause_i, R_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub time: f64,
    pub cause: Cause,
    pub removed: u32,
}

impl Record {
    pub fn new(time: f64, cause: Cause, removed: u32) -> Self {
        Self {
            time,
            cause,
            removed,
        }
    }
}

/// An ordered progressively censored sample. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgressiveSample {
    records: Vec<Record>,
    n: usize,
    m1: usize,
    log_times: Vec<f64>,
    weights: Vec<f64>,
}

impl ProgressiveSample {
    /// Builds a sample with the cohort size implied by the accounting
    /// identity `n = m + sum R_i`.
    pub fn from_records(records: Vec<Record>) -> Result<Self> {
        let n = records.len() + records.iter().map(|r| r.removed as usize).sum::<usize>();
        Self::new(records, n)
    }

    pub fn new(records: Vec<Record>, n: usize) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptySample);
        }
        for (i, r) in records.iter().enumerate() {
            if !(r.time.is_finite() && r.time > 0.0) {
                return Err(Error::InvalidSample(format!(
                    "record {}: time {} is not positive",
                    i + 1,
                    r.time
                )));
            }
            if i > 0 && r.time <= records[i - 1].time {
                return Err(Error::InvalidSample(format!(
                    "record {}: time {} does not exceed the previous time {}",
                    i + 1,
                    r.time,
                    records[i - 1].time
                )));
            }
        }
        let removed: usize = records.iter().map(|r| r.removed as usize).sum();
        if records.len() + removed != n {
            return Err(Error::InvalidSample(format!(
                "n = {n} but m + sum R = {} + {removed}",
                records.len()
            )));
        }
        let m1 = records.iter().filter(|r| r.cause == Cause::One).count();
        let log_times = records.iter().map(|r| r.time.ln()).collect();
        let weights = records.iter().map(|r| r.removed as f64 + 1.0).collect();
        Ok(Self {
            records,
            n,
            m1,
            log_times,
            weights,
        })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.records.len()
    }

    /// Number of cause-1 failures.
    pub fn m1(&self) -> usize {
        self.m1
    }

    /// Number of cause-2 failures.
    pub fn m2(&self) -> usize {
        self.m() - self.m1
    }

    pub fn failures_of(&self, cause: Cause) -> usize {
        match cause {
            Cause::One => self.m1(),
            Cause::Two => self.m2(),
        }
    }

    pub fn total_removed(&self) -> usize {
        self.n - self.m()
    }

    pub fn mean_time(&self) -> f64 {
        self.records.iter().map(|r| r.time).sum::<f64>() / self.m() as f64
    }

    /// Type-II pattern: every removal happens at the last failure.
    pub fn is_type_ii(&self) -> bool {
        self.records[..self.m() - 1].iter().all(|r| r.removed == 0)
    }

    /// `ln[n (n - R_1 - 1) ... (n - R_1 - ... - R_{m-1} - m + 1)]`.
    pub fn log_constant(&self) -> f64 {
        let mut at_risk = self.n;
        let mut total = 0.0;
        for r in &self.records {
            total += (at_risk as f64).ln();
            at_risk -= 1 + r.removed as usize;
        }
        total
    }

    /// Sums over the data that depend only on `(alpha, beta)`.
    pub fn shape_stats(&self, alpha: f64, beta: f64) -> ShapeStats {
        let log_alpha = alpha.ln();
        let mut sum_z = 0.0;
        let mut sum_log_ratio = 0.0;
        let mut exposure = 0.0;
        let mut overflow = false;
        for (&lt, &w) in self.log_times.iter().zip(&self.weights) {
            let lr = lt - log_alpha;
            let z = (beta * lr).exp();
            if z > EXP_CLAMP {
                overflow = true;
                break;
            }
            sum_z += z;
            sum_log_ratio += lr;
            exposure += w * z.exp_m1();
        }
        ShapeStats {
            alpha,
            beta,
            sum_z,
            sum_log_ratio,
            exposure,
            overflow,
        }
    }
}

/// The `(alpha, beta)`-dependent pieces of the log-likelihood, so that
/// updates in `lambda1` or `lambda2` cost O(1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeStats {
    pub alpha: f64,
    pub beta: f64,
    /// `sum z_i`
    pub sum_z: f64,
    /// `sum ln(t_i / alpha)`
    pub sum_log_ratio: f64,
    /// `sum (R_i + 1)(e^{z_i} - 1)`, nonnegative.
    pub exposure: f64,
    /// Some `z_i` exceeded the clamp; the likelihood is zero.
    pub overflow: bool,
}

impl ShapeStats {
    /// Rate of the Gamma conditional of either lambda: `alpha * exposure`.
    pub fn gamma_rate(&self) -> f64 {
        self.alpha * self.exposure
    }

    /// Log-likelihood without the combinatorial constant.
    pub fn log_likelihood(&self, lambda1: f64, lambda2: f64, s: &ProgressiveSample) -> f64 {
        if self.overflow {
            return f64::NEG_INFINITY;
        }
        let m = s.m() as f64;
        let mut l = s.m1() as f64 * lambda1.ln()
            + m * self.beta.ln()
            + self.sum_z
            + (self.beta - 1.0) * self.sum_log_ratio
            - (lambda1 + lambda2) * self.gamma_rate();
        if s.m2() > 0 {
            l += s.m2() as f64 * lambda2.ln();
        }
        l
    }
}

pub fn log_likelihood(mp: &ModelParams, s: &ProgressiveSample, include_constant: bool) -> f64 {
    let l = s
        .shape_stats(mp.alpha(), mp.beta())
        .log_likelihood(mp.lambda1(), mp.lambda2(), s);
    if include_constant {
        l + s.log_constant()
    } else {
        l
    }
}

/// Relative finite-difference step used for `alpha` and `beta`.
pub fn default_step(value: f64) -> f64 {
    (1e-4 * value).max(1e-5)
}

/// Second partial derivative of the log-likelihood in one parameter.
///
/// Exact for the rates (`-m_j / lambda_j^2`); central second difference with
/// step `h` for `alpha` and `beta`.
pub fn d2_loglik(mp: &ModelParams, s: &ProgressiveSample, which: Param, h: f64) -> Result<f64> {
    match which {
        Param::Lambda1 => Ok(-(s.m1() as f64) / (mp.lambda1() * mp.lambda1())),
        Param::Lambda2 => Ok(-(s.m2() as f64) / (mp.lambda2() * mp.lambda2())),
        Param::Alpha | Param::Beta => {
            let center = log_likelihood(mp, s, false);
            d2_central(mp, s, which, h, center)
        }
    }
}

/// Central second difference reusing an already computed `l(theta)`.
pub(crate) fn d2_central(
    mp: &ModelParams,
    s: &ProgressiveSample,
    which: Param,
    h: f64,
    center: f64,
) -> Result<f64> {
    let theta = mp.get(which);
    if !(h > 0.0) || theta - 2.0 * h <= 0.0 {
        return Err(Error::StepTooLarge {
            param: which,
            value: theta,
            step: h,
        });
    }
    let up = log_likelihood(&mp.with(which, theta + h)?, s, false);
    let down = log_likelihood(&mp.with(which, theta - h)?, s, false);
    let d2 = (up - 2.0 * center + down) / (h * h);
    if d2.is_finite() {
        Ok(d2)
    } else {
        Err(Error::NonFinite(which))
    }
}
