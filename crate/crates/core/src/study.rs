//! Replicated simulate-then-fit runs for frequentist checks of the
//! credible intervals.

use serde::Serialize;

use crate::error::Result;
use crate::model::Param;
use crate::par::{self, Execution};
use crate::posterior::{summarize, PosteriorSummary};
use crate::sampler::{run_chain, ChainConfig};
use crate::simulate::{generate, SimSpec};

#[derive(Debug, Clone, Serialize)]
pub struct Replicate {
    pub data_seed: u64,
    pub summary: PosteriorSummary,
    /// Whether each true parameter fell inside its HPD interval.
    pub covered: [bool; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageReport {
    pub replicates: Vec<Replicate>,
}

impl CoverageReport {
    pub fn hits(&self, which: Param) -> usize {
        self.replicates
            .iter()
            .filter(|r| r.covered[which.index()])
            .count()
    }

    pub fn len(&self) -> usize {
        self.replicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replicates.is_empty()
    }
}

/// For each data seed: simulate from `spec`, run one chain, check whether
/// the true parameters lie in their `1 - gamma` HPD intervals. The chain seed
/// is `chain.seed` with stream `data_seed`.
pub fn coverage(
    spec: &SimSpec,
    data_seeds: &[u64],
    chain: &ChainConfig,
    gamma: f64,
    exec: Execution,
) -> Result<CoverageReport> {
    let results = par::map(exec, data_seeds, |&seed| -> Result<Replicate> {
        let mut s = spec.clone();
        s.seed = seed;
        let data = generate(&s)?;
        let mut cc = chain.clone();
        cc.stream = seed;
        let fitted = run_chain(&cc, &data)?;
        let summary = summarize(fitted.draws(), gamma)?;
        let covered = Param::ALL.map(|p| summary.hpd(p).contains(spec.params.get(p)));
        Ok(Replicate {
            data_seed: seed,
            summary,
            covered,
        })
    });
    Ok(CoverageReport {
        replicates: results.into_iter().collect::<Result<_>>()?,
    })
}
