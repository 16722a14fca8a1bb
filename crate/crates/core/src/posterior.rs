//! Posterior means, medians and HPD intervals from retained draws.
//!
//! The `100(1 - gamma)%` HPD interval is the narrowest window of
//! `k = ceil(M (1 - gamma))` consecutive order statistics.

use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Param};
use crate::stats::sorted_median;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hpd {
    pub lower: f64,
    pub upper: f64,
    /// Window covers the whole sample (`M gamma < 1` or `M = 1`).
    pub degenerate: bool,
}

impl Hpd {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Number of order statistics in the HPD window. The small slack absorbs
/// rounding in `M (1 - gamma)` when `M gamma` is integral.
pub fn hpd_window(m: usize, gamma: f64) -> usize {
    let k = (m as f64 * (1.0 - gamma) - 1e-9).ceil() as usize;
    k.clamp(1, m)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "gamma",
            value: gamma,
            domain: "(0, 1)",
        })
    }
}

/// HPD interval of already sorted values. Ties between equally narrow
/// windows go to the leftmost.
pub fn hpd_sorted(sorted: &[f64], gamma: f64) -> Result<Hpd> {
    check_gamma(gamma)?;
    let m = sorted.len();
    if m == 0 {
        return Err(Error::EmptyChain);
    }
    let k = hpd_window(m, gamma);
    let degenerate = k == m;
    if degenerate {
        warn!("HPD window covers all {m} draws at gamma = {gamma}");
    }
    let mut best = 0;
    let mut best_width = f64::INFINITY;
    for j in 0..=m - k {
        let width = sorted[j + k - 1] - sorted[j];
        if width < best_width {
            best_width = width;
            best = j;
        }
    }
    Ok(Hpd {
        lower: sorted[best],
        upper: sorted[best + k - 1],
        degenerate,
    })
}

pub fn hpd_interval(samples: &[f64], gamma: f64) -> Result<Hpd> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    hpd_sorted(&sorted, gamma)
}

/// Posterior mean of one coordinate.
pub fn bayes_mean(draws: &[ModelParams], which: Param) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    Ok(draws.iter().map(|d| d.get(which)).sum::<f64>() / draws.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub median: f64,
    pub hpd_lower: f64,
    pub hpd_upper: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub gamma: f64,
    pub draws: usize,
    pub params: Vec<ParamSummary>,
    pub degenerate_hpd: bool,
}

impl PosteriorSummary {
    pub fn get(&self, which: Param) -> &ParamSummary {
        &self.params[which.index()]
    }

    pub fn hpd(&self, which: Param) -> Hpd {
        let p = self.get(which);
        Hpd {
            lower: p.hpd_lower,
            upper: p.hpd_upper,
            degenerate: self.degenerate_hpd,
        }
    }

    /// Plain-text table, one row per parameter.
    pub fn to_table(&self) -> String {
        let level = 100.0 * (1.0 - self.gamma);
        let mut out = format!(
            "{:<8} {:>14} {:>14} {:>14} {:>14}\n",
            "param",
            "mean",
            "median",
            format!("hpd{level}_lo"),
            format!("hpd{level}_hi")
        );
        for p in &self.params {
            let _ = writeln!(
                out,
                "{:<8} {:>14.6} {:>14.6} {:>14.6} {:>14.6}",
                p.name, p.mean, p.median, p.hpd_lower, p.hpd_upper
            );
        }
        let _ = writeln!(out, "draws: {}", self.draws);
        out
    }

    /// One JSON object per line, per parameter.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for p in &self.params {
            out.push_str(&serde_json::to_string(p)?);
            out.push('\n');
        }
        Ok(out)
    }
}

pub fn summarize(draws: &[ModelParams], gamma: f64) -> Result<PosteriorSummary> {
    check_gamma(gamma)?;
    if draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    let mut degenerate_hpd = false;
    let mut params = Vec::with_capacity(4);
    for which in Param::ALL {
        let mut xs: Vec<f64> = draws.iter().map(|d| d.get(which)).collect();
        xs.sort_by(f64::total_cmp);
        let hpd = hpd_sorted(&xs, gamma)?;
        degenerate_hpd |= hpd.degenerate;
        params.push(ParamSummary {
            name: which.name().to_string(),
            mean: bayes_mean(draws, which)?,
            median: sorted_median(&xs),
            hpd_lower: hpd.lower,
            hpd_upper: hpd.upper,
            gamma,
        });
    }
    Ok(PosteriorSummary {
        gamma,
        draws: draws.len(),
        params,
        degenerate_hpd,
    })
}
