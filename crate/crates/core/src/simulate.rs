//! Competing-risks data under (progressive) Type-II censoring.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{ProgressiveSample, Record};
use crate::model::{sample_latent_pair, Cause, ModelParams};
use crate::par::{self, Execution};
use crate::sampler::make_rng;

/// Removal plan `(R_1, ..., R_m)` for a cohort of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemeRepr")]
pub struct CensoringScheme {
    n: usize,
    removals: Vec<u32>,
}

#[derive(Deserialize)]
struct SchemeRepr {
    n: usize,
    removals: Vec<u32>,
}

impl TryFrom<SchemeRepr> for CensoringScheme {
    type Error = Error;

    fn try_from(r: SchemeRepr) -> Result<Self> {
        Self::new(r.n, r.removals)
    }
}

impl CensoringScheme {
    pub fn new(n: usize, removals: Vec<u32>) -> Result<Self> {
        let m = removals.len();
        if m == 0 {
            return Err(Error::Config("censoring scheme needs m >= 1".into()));
        }
        let total: usize = removals.iter().map(|&r| r as usize).sum();
        if m + total != n {
            return Err(Error::Config(format!(
                "censoring scheme infeasible: m + sum R = {} but n = {n}",
                m + total
            )));
        }
        Ok(Self { n, removals })
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, vec![0; n])
    }

    /// All `n - m` withdrawals at the last failure.
    pub fn type_ii(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::Config(format!(
                "Type-II needs 1 <= m <= n, got m = {m}, n = {n}"
            )));
        }
        let mut removals = vec![0; m];
        removals[m - 1] = (n - m) as u32;
        Self::new(n, removals)
    }

    /// `m = floor(0.8 n)`; one unit withdrawn at every `floor(n / (n - m))`-th
    /// failure, remainder withdrawn at the last failure.
    pub fn progressive_default(n: usize) -> Result<Self> {
        let m = (n * 4) / 5;
        if m == 0 {
            return Err(Error::Config(format!("cohort n = {n} too small")));
        }
        let to_remove = n - m;
        let mut removals = vec![0u32; m];
        if to_remove > 0 {
            let spacing = n / to_remove;
            let mut left = to_remove;
            for i in (spacing..=m).step_by(spacing) {
                if left == 0 {
                    break;
                }
                removals[i - 1] += 1;
                left -= 1;
            }
            removals[m - 1] += left as u32;
        }
        Self::new(n, removals)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.removals.len()
    }

    pub fn removals(&self) -> &[u32] {
        &self.removals
    }

    pub fn is_type_ii(&self) -> bool {
        self.removals[..self.m() - 1].iter().all(|&r| r == 0)
    }

    pub fn is_complete(&self) -> bool {
        self.m() == self.n
    }
}

/// How failure causes are assigned to simulated lifetimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CauseMode {
    /// Minimum of two latent lifetimes; the cause is the argmin.
    LatentMin,
    /// Lifetime drawn with rate `lambda1 + lambda2`, cause by a fair coin.
    BernoulliHalf,
}

impl FromStr for CauseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "latent-min" | "latent_min" => Ok(CauseMode::LatentMin),
            "bernoulli-half" | "bernoulli_half" => Ok(CauseMode::BernoulliHalf),
            _ => Err(Error::Config(format!(
                "unknown cause mode `{s}` (expected latent-min or bernoulli-half)"
            ))),
        }
    }
}

impl fmt::Display for CauseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CauseMode::LatentMin => "latent-min",
            CauseMode::BernoulliHalf => "bernoulli-half",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub name: String,
    pub params: ModelParams,
    pub scheme: CensoringScheme,
    pub cause_mode: CauseMode,
    pub seed: u64,
}

pub const SCHEME_IDS: [u32; 4] = [1, 2, 3, 4];

/// The four validation schemes (n = 200): schemes 1 and 3 keep all 200
/// failures; 2 and 4 use [`CensoringScheme::progressive_default`].
pub fn scheme(id: u32, seed: u64) -> Result<SimSpec> {
    let n = 200;
    let (lambda2, progressive) = match id {
        1 => (0.6, false),
        2 => (0.6, true),
        3 => (1.0, false),
        4 => (1.0, true),
        _ => {
            return Err(Error::Config(format!(
                "unknown scheme {id}; valid schemes are 1, 2, 3, 4"
            )))
        }
    };
    let scheme = if progressive {
        CensoringScheme::progressive_default(n)?
    } else {
        CensoringScheme::type_ii(n, n)?
    };
    Ok(SimSpec {
        name: format!("scheme{id}"),
        params: ModelParams::new(1.0, lambda2, 0.3, 0.1)?,
        scheme,
        cause_mode: CauseMode::LatentMin,
        seed,
    })
}

pub fn scheme_catalog(seed: u64) -> Vec<SimSpec> {
    SCHEME_IDS
        .iter()
        .map(|&id| scheme(id, seed).expect("catalog ids are valid"))
        .collect()
}

fn draw_unit<R: Rng + ?Sized>(spec: &SimSpec, rng: &mut R) -> (f64, Cause) {
    match spec.cause_mode {
        CauseMode::LatentMin => sample_latent_pair(&spec.params, rng),
        CauseMode::BernoulliHalf => {
            let t = spec.params.total_risk().sample(rng);
            let cause = if rng.random::<bool>() {
                Cause::One
            } else {
                Cause::Two
            };
            (t, cause)
        }
    }
}

/// Sequential-removal simulation: draw `n` lifetimes, then repeatedly record
/// the earliest survivor as the next failure and withdraw `R_i` survivors
/// chosen uniformly at random.
pub fn generate(spec: &SimSpec) -> Result<ProgressiveSample> {
    let mut rng = make_rng(spec.seed, 0);
    let n = spec.scheme.n();
    let mut alive: Vec<(f64, Cause)> = (0..n).map(|_| draw_unit(spec, &mut rng)).collect();
    alive.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Kept in descending order so the next failure pops off the end.
    alive.reverse();
    let mut records = Vec::with_capacity(spec.scheme.m());
    for &r in spec.scheme.removals() {
        let (time, cause) = alive.pop().ok_or_else(|| {
            Error::Config("censoring scheme removed more units than were alive".into())
        })?;
        records.push(Record::new(time, cause, r));
        let r = r as usize;
        if r > alive.len() {
            return Err(Error::Config(format!(
                "cannot withdraw {r} units with {} alive",
                alive.len()
            )));
        }
        let mut picked = index::sample(&mut rng, alive.len(), r).into_vec();
        picked.sort_unstable_by(|a, b| b.cmp(a));
        for i in picked {
            alive.remove(i);
        }
    }
    ProgressiveSample::new(records, n)
}

/// One dataset per seed, same design otherwise.
pub fn generate_many(
    spec: &SimSpec,
    seeds: &[u64],
    exec: Execution,
) -> Vec<Result<ProgressiveSample>> {
    par::map(exec, seeds, |&seed| {
        let mut s = spec.clone();
        s.seed = seed;
        generate(&s)
    })
}
