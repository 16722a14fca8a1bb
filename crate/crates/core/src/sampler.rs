//! Univariate slice sampling (stepping out + shrinkage) and the
//! deterministic-scan Gibbs sampler built on it.
//!
//! Every parameter is positive, so the Gibbs updates slice on `y = ln theta`
//! with target `ln p(e^y) + y`.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::ProgressiveSample;
use crate::model::{ModelParams, Param};
use crate::par::{self, Execution};
use crate::prior::ConditionalTarget;

/// Name of the generator recorded in chain provenance.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64 + set_stream";

/// Seeded generator; `stream` splits one seed into independent sequences.
pub fn make_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceConfig {
    pub width: f64,
    pub max_stepout: u32,
    pub max_shrink: u32,
}

impl SliceConfig {
    pub fn new(width: f64, max_stepout: u32, max_shrink: u32) -> Result<Self> {
        let cfg = Self {
            width,
            max_stepout,
            max_shrink,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::Config(format!(
                "slice width {} must be > 0",
                self.width
            )));
        }
        if self.max_stepout < 1 || self.max_shrink < 1 {
            return Err(Error::Config(
                "max_stepout and max_shrink must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for SliceConfig {
    fn default() -> Self {
        Self {
            width: 1.0,
            max_stepout: 50,
            max_shrink: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceOutcome {
    pub value: f64,
    pub evaluations: u32,
    pub stepouts: u32,
    pub shrinks: u32,
    /// Shrinkage ran out; `value` is the starting point.
    pub exhausted: bool,
}

/// One slice-sampling transition on the real line.
///
/// NaN from `log_density` is read as `-inf` (outside the support).
pub fn slice_step<F, R>(
    mut log_density: F,
    x0: f64,
    cfg: &SliceConfig,
    rng: &mut R,
) -> Result<SliceOutcome>
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    let mut evaluations = 0u32;
    let mut eval = |x: f64| {
        evaluations += 1;
        let v = log_density(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let f0 = eval(x0);
    if !f0.is_finite() {
        return Err(Error::InvalidCurrentPoint(x0));
    }
    let u: f64 = rng.random();
    let level = f0 + u.ln();

    // Stepping out, with the step budget split at random between the ends.
    let w = cfg.width;
    let mut left = x0 - rng.random::<f64>() * w;
    let mut right = left + w;
    let budget = cfg.max_stepout;
    let mut j = (rng.random::<f64>() * budget as f64).floor() as u32;
    let mut k = budget - 1 - j.min(budget - 1);
    j = j.min(budget - 1);
    let mut stepouts = 0;
    while j > 0 && eval(left) > level {
        left -= w;
        j -= 1;
        stepouts += 1;
    }
    while k > 0 && eval(right) > level {
        right += w;
        k -= 1;
        stepouts += 1;
    }

    let mut shrinks = 0;
    while shrinks < cfg.max_shrink {
        let x1 = left + rng.random::<f64>() * (right - left);
        if eval(x1) > level {
            return Ok(SliceOutcome {
                value: x1,
                evaluations,
                stepouts,
                shrinks,
                exhausted: false,
            });
        }
        shrinks += 1;
        if x1 < x0 {
            left = x1;
        } else {
            right = x1;
        }
    }
    Ok(SliceOutcome {
        value: x0,
        evaluations,
        stepouts,
        shrinks,
        exhausted: true,
    })
}

/// Slice step for a positive variable, performed on its logarithm.
/// `width` is measured on the log scale.
pub fn slice_step_positive<F, R>(
    mut log_density: F,
    x0: f64,
    cfg: &SliceConfig,
    rng: &mut R,
) -> Result<SliceOutcome>
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::InvalidCurrentPoint(x0));
    }
    let mut out = slice_step(
        |y| {
            let x = y.exp();
            if x > 0.0 && x.is_finite() {
                log_density(x) + y
            } else {
                f64::NEG_INFINITY
            }
        },
        x0.ln(),
        cfg,
        rng,
    )
    .map_err(|_| Error::InvalidCurrentPoint(x0))?;
    out.value = if out.exhausted { x0 } else { out.value.exp() };
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamDiagnostics {
    pub updates: u64,
    pub evaluations: u64,
    pub stepouts: u64,
    pub shrinks: u64,
    pub exhausted: u64,
    /// Points where the conditional density could not be evaluated, most
    /// often because the local information was nonpositive.
    pub rejected_points: u64,
    /// Sweeps where the current value fell outside the support of its
    /// refreshed conditional, so the coordinate was left unchanged.
    pub held: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub lambda1: ParamDiagnostics,
    pub lambda2: ParamDiagnostics,
    pub alpha: ParamDiagnostics,
    pub beta: ParamDiagnostics,
}

impl Diagnostics {
    pub fn get(&self, which: Param) -> &ParamDiagnostics {
        match which {
            Param::Lambda1 => &self.lambda1,
            Param::Lambda2 => &self.lambda2,
            Param::Alpha => &self.alpha,
            Param::Beta => &self.beta,
        }
    }

    fn get_mut(&mut self, which: Param) -> &mut ParamDiagnostics {
        match which {
            Param::Lambda1 => &mut self.lambda1,
            Param::Lambda2 => &mut self.lambda2,
            Param::Alpha => &mut self.alpha,
            Param::Beta => &mut self.beta,
        }
    }
}

/// Slice configuration per parameter, indexed in update order.
pub type SweepConfig = [SliceConfig; 4];

/// Single-parameter update from its full conditional.
pub fn update_param<R: Rng + ?Sized>(
    state: &ModelParams,
    which: Param,
    data: &ProgressiveSample,
    cfg: &SliceConfig,
    rng: &mut R,
    diag: &mut Diagnostics,
) -> Result<ModelParams> {
    let target = ConditionalTarget::new(which, *state, data)?;
    let mut rejected = 0u64;
    let result = slice_step_positive(
        |x| match target.log_posterior(x) {
            Ok(v) => v,
            Err(_) => {
                rejected += 1;
                f64::NEG_INFINITY
            }
        },
        state.get(which),
        cfg,
        rng,
    );
    // The finite-difference priors for the shape parameters only exist where
    // the local information is positive, and that region moves with the other
    // coordinates. A current value stranded outside it is held for this sweep.
    let outcome = match result {
        Ok(o) => o,
        Err(Error::InvalidCurrentPoint(_)) if matches!(which, Param::Alpha | Param::Beta) => {
            let d = diag.get_mut(which);
            d.updates += 1;
            d.held += 1;
            d.rejected_points += rejected;
            return Ok(*state);
        }
        Err(e) => return Err(e),
    };
    let d = diag.get_mut(which);
    d.updates += 1;
    d.evaluations += outcome.evaluations as u64;
    d.stepouts += outcome.stepouts as u64;
    d.shrinks += outcome.shrinks as u64;
    d.exhausted += outcome.exhausted as u64;
    d.rejected_points += rejected;
    state.with(which, outcome.value)
}

/// One deterministic scan: lambda1, lambda2, alpha, beta, each conditioned
/// on the freshest values of the others.
pub fn gibbs_sweep<R: Rng + ?Sized>(
    mp: &ModelParams,
    data: &ProgressiveSample,
    cfgs: &SweepConfig,
    rng: &mut R,
    diag: &mut Diagnostics,
) -> Result<ModelParams> {
    gibbs_sweep_observed(mp, data, cfgs, rng, diag, |_, _| {})
}

/// [`gibbs_sweep`] with a hook called after each coordinate update.
pub fn gibbs_sweep_observed<R, O>(
    mp: &ModelParams,
    data: &ProgressiveSample,
    cfgs: &SweepConfig,
    rng: &mut R,
    diag: &mut Diagnostics,
    mut observer: O,
) -> Result<ModelParams>
where
    R: Rng + ?Sized,
    O: FnMut(Param, &ModelParams),
{
    let mut state = *mp;
    for which in Param::ALL {
        state = update_param(&state, which, data, &cfgs[which.index()], rng, diag)?;
        observer(which, &state);
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// RNG stream, so several chains can share one seed.
    pub stream: u64,
    /// Starting point; `None` uses [`default_init`].
    pub init: Option<ModelParams>,
    pub slice: SweepConfig,
}

impl ChainConfig {
    /// Defaults: burn-in `iterations / 5`, no thinning, unit log-scale widths.
    pub fn new(iterations: usize, seed: u64) -> Self {
        Self {
            iterations,
            burn_in: iterations / 5,
            thin: 1,
            seed,
            stream: 0,
            init: None,
            slice: [SliceConfig::default(); 4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn-in {} must be below iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be positive".into()));
        }
        for cfg in &self.slice {
            cfg.validate()?;
        }
        Ok(())
    }

    /// Draws kept after burn-in and thinning.
    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in).div_ceil(self.thin)
    }
}

/// Starting point from the data: `lambda_j = m_j / (n tbar)`, `alpha = tbar`,
/// `beta = 1`, where `tbar` is the mean observed failure time.
pub fn default_init(data: &ProgressiveSample) -> Result<ModelParams> {
    for (which, count) in [(Param::Lambda1, data.m1()), (Param::Lambda2, data.m2())] {
        if count == 0 {
            return Err(Error::PriorDegenerate(which));
        }
    }
    let tbar = data.mean_time();
    let scale = data.n() as f64 * tbar;
    ModelParams::new(
        data.m1() as f64 / scale,
        data.m2() as f64 / scale,
        tbar,
        1.0,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    draws: Vec<ModelParams>,
    pub diagnostics: Diagnostics,
    pub config: ChainConfig,
    pub init: ModelParams,
    pub rng: String,
}

impl Chain {
    pub fn draws(&self) -> &[ModelParams] {
        &self.draws
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn values(&self, which: Param) -> Vec<f64> {
        self.draws.iter().map(|d| d.get(which)).collect()
    }
}

pub const CHAIN_HEADER: &str = "lambda1,lambda2,alpha,beta";

/// One draw per line under [`CHAIN_HEADER`], shortest round-trip decimals.
pub fn chain_to_csv(draws: &[ModelParams]) -> String {
    let mut out = String::with_capacity(64 * (draws.len() + 1));
    out.push_str(CHAIN_HEADER);
    out.push('\n');
    for d in draws {
        let [a, b, c, e] = d.to_array();
        let _ = writeln!(out, "{a},{b},{c},{e}");
    }
    out
}

pub fn chain_from_csv<R: Read>(source: R) -> Result<Vec<ModelParams>> {
    let mut lines = BufReader::new(source).lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::EmptyChain),
    };
    if header.trim() != CHAIN_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{CHAIN_HEADER}`"),
        });
    }
    let mut draws = Vec::new();
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| Error::Parse {
            line: i + 1,
            message,
        };
        let vals = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(format!("`{f}` is not a number")))
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", vals.len())));
        }
        draws.push(ModelParams::from_slice(&vals).map_err(|e| bad(e.to_string()))?);
    }
    if draws.is_empty() {
        return Err(Error::EmptyChain);
    }
    Ok(draws)
}

pub fn run_chain(cc: &ChainConfig, data: &ProgressiveSample) -> Result<Chain> {
    cc.validate()?;
    if cc.retained() < 100 {
        warn!(
            "only {} draws retained after burn-in and thinning",
            cc.retained()
        );
    }
    let init = match cc.init {
        Some(p) => p,
        None => default_init(data)?,
    };
    let mut rng = make_rng(cc.seed, cc.stream);
    let mut diag = Diagnostics::default();
    let mut state = init;
    let mut draws = Vec::with_capacity(cc.retained());
    for it in 0..cc.iterations {
        state = gibbs_sweep(&state, data, &cc.slice, &mut rng, &mut diag).map_err(|e| match e {
            Error::PriorDegenerate(_) => e,
            other => Error::ChainAborted {
                iteration: it,
                source: Box::new(other),
            },
        })?;
        if it >= cc.burn_in && (it - cc.burn_in).is_multiple_of(cc.thin) {
            draws.push(state);
        }
    }
    Ok(Chain {
        draws,
        diagnostics: diag,
        config: cc.clone(),
        init,
        rng: RNG_ALGORITHM.to_string(),
    })
}

/// Independent chains, one per config.
pub fn run_chains(
    configs: &[ChainConfig],
    data: &ProgressiveSample,
    exec: Execution,
) -> Vec<Result<Chain>> {
    par::map(exec, configs, |cc| run_chain(cc, data))
}
