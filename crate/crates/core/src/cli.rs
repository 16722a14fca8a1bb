//! Command-line front end: `simulate`, `ingest`, `fit`, `plot` and `rerun`.
//!
//! Every command that writes to a directory also writes `manifest.json`
//! there. The manifest holds the fully resolved argument vector and a digest
//! of the input, so `rerun` can replay it without the original config file.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest;
use crate::model::{ModelParams, Param};
use crate::par::Execution;
use crate::plot;
use crate::posterior::summarize;
use crate::sampler::{
    chain_from_csv, chain_to_csv, run_chains, ChainConfig, SliceConfig, RNG_ALGORITHM,
};
use crate::simulate::{self, CauseMode, SimSpec};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

pub const MANIFEST: &str = "manifest.json";
pub const DATASET: &str = "data.csv";

#[derive(Debug, Parser)]
#[command(
    name = "cenrisk",
    version,
    about = "Competing-risks modified Weibull under progressive censoring"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a censored competing-risks dataset.
    Simulate(SimulateArgs),
    /// Prepare the follicular lymphoma file as a censored sample.
    Ingest(IngestArgs),
    /// Run slice-within-Gibbs chains and summarize the posterior.
    Fit(FitArgs),
    /// Trace and histogram tables and images for a chain file.
    Plot(PlotArgs),
    /// Replay the command recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Built-in scheme, 1-4.
    #[arg(long, required_unless_present = "spec", conflicts_with = "spec")]
    pub scheme: Option<u32>,
    /// JSON simulation spec (parameters, censoring plan, cause mode, seed).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// latent-min or bernoulli-half.
    #[arg(long)]
    pub cause_mode: Option<CauseMode>,
    /// Output directory; the dataset goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub input: PathBuf,
    /// 1: failures only. 2: censored rows become removals.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub case: u8,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Dataset in the canonical format, or `-` for stdin.
    pub input: String,
    /// Plain `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    /// HPD intervals have content `1 - gamma`.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Log-scale slice width: one value, or four (lambda1,lambda2,alpha,beta).
    #[arg(long)]
    pub width: Option<String>,
    /// Starting point `lambda1,lambda2,alpha,beta`.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chains: Option<usize>,
    /// One seed per chain, comma separated.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Output directory; without it the chain goes to stdout and the
    /// summary to stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub chain: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    pub manifest: PathBuf,
    /// Use this file instead of the recorded input; its digest must match.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
    /// Position of the input in `args`, for substitution on rerun.
    pub arg_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Resolved arguments, `--out` excluded.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub input: Option<InputRecord>,
    pub outputs: Vec<String>,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub rng: String,
    pub version: String,
    pub notes: Vec<String>,
}

/// Map an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        return EXIT_NUMERIC;
    }
    match e {
        Error::Config(_) | Error::InvalidParameter { .. } | Error::Domain { .. } => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Ingest(a) => cmd_ingest(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Rerun(a) => cmd_rerun(a),
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_input(path: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if path == "-" {
        io::stdin().lock().read_to_end(&mut buf)?;
    } else {
        buf = fs::read(path)?;
    }
    Ok(buf)
}

/// Collects files written into one output directory, then the manifest.
struct Output {
    dir: PathBuf,
    files: Vec<String>,
    started: u64,
}

impl Output {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            started: now_ms(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn finish(self, mut manifest: RunManifest) -> Result<()> {
        manifest.outputs = self.files;
        manifest.started_unix_ms = self.started;
        manifest.finished_unix_ms = now_ms();
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(self.dir.join(MANIFEST), text)?;
        Ok(())
    }
}

fn manifest(
    command: &str,
    args: Vec<String>,
    config: serde_json::Value,
    seeds: Vec<u64>,
) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        args,
        config,
        seeds,
        input: None,
        outputs: Vec::new(),
        started_unix_ms: 0,
        finished_unix_ms: 0,
        rng: RNG_ALGORITHM.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        notes: Vec::new(),
    }
}

fn emit_stdout(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let mut input = None;
    let mut args = vec!["simulate".to_string()];
    let mut spec: SimSpec = match (&a.scheme, &a.spec) {
        (Some(id), _) => {
            args.extend(["--scheme".into(), id.to_string()]);
            simulate::scheme(*id, 0)?
        }
        (None, Some(path)) => {
            let bytes = fs::read(path)?;
            args.extend(["--spec".into(), path.display().to_string()]);
            input = Some(InputRecord {
                path: path.display().to_string(),
                sha256: sha256_hex(&bytes),
                arg_index: 2,
            });
            serde_json::from_slice(&bytes)?
        }
        (None, None) => {
            return Err(Error::Config(
                "one of --scheme or --spec is required".into(),
            ))
        }
    };
    if a.spec.is_none() || a.seed.is_some() {
        spec.seed = a.seed.unwrap_or(1);
    }
    if let Some(mode) = a.cause_mode {
        spec.cause_mode = mode;
    }
    args.extend(["--seed".into(), spec.seed.to_string()]);
    args.extend(["--cause-mode".into(), spec.cause_mode.to_string()]);

    let sample = simulate::generate(&spec)?;
    let text = ingest::write_dataset(&sample);
    let Some(dir) = a.out else {
        return emit_stdout(&text);
    };
    let mut out = Output::create(&dir)?;
    out.write(DATASET, &text)?;
    let mut m = manifest(
        "simulate",
        args,
        serde_json::to_value(&spec)?,
        vec![spec.seed],
    );
    m.input = input;
    m.notes.push(format!(
        "n={} m={} m1={} m2={}",
        sample.n(),
        sample.m(),
        sample.m1(),
        sample.m2()
    ));
    out.finish(m)
}

fn cmd_ingest(a: IngestArgs) -> Result<()> {
    let bytes = fs::read(&a.input)?;
    let rows = ingest::parse_dataset(bytes.as_slice())?;
    let counts = ingest::tabulate(&rows);
    let prepared = match a.case {
        1 => ingest::prepare_case1(&rows)?,
        _ => ingest::prepare_case2(&rows)?,
    };
    let text = ingest::write_dataset(&prepared.sample);
    let Some(dir) = a.out else {
        return emit_stdout(&text);
    };
    let path = a.input.display().to_string();
    let args = vec![
        "ingest".into(),
        path.clone(),
        "--case".into(),
        a.case.to_string(),
    ];
    let mut out = Output::create(&dir)?;
    out.write(DATASET, &text)?;
    let config = serde_json::json!({
        "case": a.case,
        "cause_counts": { "censored": counts[0], "disease": counts[1], "competing_death": counts[2] },
    });
    let mut m = manifest("ingest", args, config, Vec::new());
    m.input = Some(InputRecord {
        path,
        sha256: sha256_hex(&bytes),
        arg_index: 1,
    });
    m.notes.push(format!(
        "{} records, {} removed in total",
        prepared.sample.m(),
        prepared.sample.total_removed()
    ));
    m.notes.push(format!(
        "{} tied failure times moved up by one ulp; {} leading censored rows folded into R_1",
        prepared.tie_adjustments, prepared.leading_censored
    ));
    out.finish(m)
}

/// `key = value` lines; `#` starts a comment. Keys may use `-` or `_`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn parse_list<T: std::str::FromStr>(what: &str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|f| {
            f.trim()
                .parse()
                .map_err(|_| Error::Config(format!("{what}: `{}` is not valid", f.trim())))
        })
        .collect()
}

/// Fit settings after flags, config file and defaults are merged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSettings {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub gamma: f64,
    pub widths: [f64; 4],
    pub init: Option<ModelParams>,
    /// `(seed, stream)` per chain.
    pub chains: Vec<(u64, u64)>,
    explicit_seeds: bool,
}

impl FitSettings {
    pub fn resolve(a: &FitArgs) -> Result<Self> {
        let file = match &a.config {
            Some(p) => parse_config(&fs::read_to_string(p)?)?,
            None => BTreeMap::new(),
        };
        for key in file.keys() {
            if ![
                "iterations",
                "burn_in",
                "thin",
                "gamma",
                "width",
                "init",
                "seed",
                "chains",
                "seeds",
            ]
            .contains(&key.as_str())
            {
                return Err(Error::Config(format!("unknown config key `{key}`")));
            }
        }
        fn pick<T: std::str::FromStr>(
            flag: Option<T>,
            file: &BTreeMap<String, String>,
            key: &str,
        ) -> Result<Option<T>> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => file
                    .get(key)
                    .map(|s| {
                        s.parse().map_err(|_| {
                            Error::Config(format!("config `{key}`: `{s}` is not valid"))
                        })
                    })
                    .transpose(),
            }
        }
        let iterations = pick(a.iterations, &file, "iterations")?.unwrap_or(10_000);
        let burn_in = pick(a.burn_in, &file, "burn_in")?.unwrap_or(iterations / 5);
        let thin = pick(a.thin, &file, "thin")?.unwrap_or(1);
        let gamma = pick(a.gamma, &file, "gamma")?.unwrap_or(0.05);
        let widths = match pick(a.width.clone(), &file, "width")? {
            None => [1.0; 4],
            Some(s) => match parse_list::<f64>("width", &s)?.as_slice() {
                [w] => [*w; 4],
                [a, b, c, d] => [*a, *b, *c, *d],
                other => {
                    return Err(Error::Config(format!(
                        "width takes 1 or 4 values, got {}",
                        other.len()
                    )))
                }
            },
        };
        let init = pick(a.init.clone(), &file, "init")?
            .map(|s| ModelParams::from_slice(&parse_list::<f64>("init", &s)?))
            .transpose()?;
        let seeds: Option<Vec<u64>> = pick(a.seeds.clone(), &file, "seeds")?
            .map(|s| parse_list("seeds", &s))
            .transpose()?;
        let count = pick(a.chains, &file, "chains")?;
        let (chains, explicit_seeds) = match seeds {
            Some(list) => {
                if let Some(k) = count {
                    if k != list.len() {
                        return Err(Error::Config(format!(
                            "--chains {k} but {} seeds given",
                            list.len()
                        )));
                    }
                }
                (list.into_iter().map(|s| (s, 0)).collect::<Vec<_>>(), true)
            }
            None => {
                let seed = pick(a.seed, &file, "seed")?.unwrap_or(1);
                let k = count.unwrap_or(1);
                ((0..k as u64).map(|i| (seed, i)).collect(), false)
            }
        };
        if chains.is_empty() {
            return Err(Error::Config("at least one chain is required".into()));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Config(format!("gamma {gamma} must lie in (0, 1)")));
        }
        let s = Self {
            iterations,
            burn_in,
            thin,
            gamma,
            widths,
            init,
            chains,
            explicit_seeds,
        };
        for cc in s.chain_configs()? {
            cc.validate()?;
        }
        Ok(s)
    }

    pub fn chain_configs(&self) -> Result<Vec<ChainConfig>> {
        let mut slice = [SliceConfig::default(); 4];
        for (cfg, w) in slice.iter_mut().zip(self.widths) {
            *cfg = SliceConfig::new(w, cfg.max_stepout, cfg.max_shrink)?;
        }
        Ok(self
            .chains
            .iter()
            .map(|&(seed, stream)| ChainConfig {
                iterations: self.iterations,
                burn_in: self.burn_in,
                thin: self.thin,
                seed,
                stream,
                init: self.init,
                slice,
            })
            .collect())
    }

    /// Arguments that reproduce these settings with no config file.
    pub fn to_args(&self, input: &str) -> Vec<String> {
        let join = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut args = vec![
            "fit".to_string(),
            input.to_string(),
            "--iterations".into(),
            self.iterations.to_string(),
            "--burn-in".into(),
            self.burn_in.to_string(),
            "--thin".into(),
            self.thin.to_string(),
            "--gamma".into(),
            self.gamma.to_string(),
            "--width".into(),
            join(&self.widths),
        ];
        if let Some(init) = self.init {
            args.extend(["--init".into(), join(&init.to_array())]);
        }
        if self.explicit_seeds {
            let seeds: Vec<String> = self.chains.iter().map(|c| c.0.to_string()).collect();
            args.extend(["--seeds".into(), seeds.join(",")]);
        } else {
            args.extend(["--seed".into(), self.chains[0].0.to_string()]);
            args.extend(["--chains".into(), self.chains.len().to_string()]);
        }
        args
    }
}

fn cmd_fit(a: FitArgs) -> Result<()> {
    let settings = FitSettings::resolve(&a)?;
    if a.out.is_none() && settings.chains.len() > 1 {
        return Err(Error::Config("several chains need --out".into()));
    }
    let bytes = read_input(&a.input)?;
    let data = ingest::read_dataset(bytes.as_slice())?;
    let configs = settings.chain_configs()?;
    let chains = run_chains(&configs, &data, Execution::default())
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let pooled: Vec<ModelParams> = chains
        .iter()
        .flat_map(|c| c.draws().iter().copied())
        .collect();
    let summary = summarize(&pooled, settings.gamma)?;

    let Some(dir) = a.out else {
        emit_stdout(&chain_to_csv(chains[0].draws()))?;
        eprint!("{}", summary.to_table());
        return Ok(());
    };
    let mut out = Output::create(&dir)?;
    for (k, chain) in chains.iter().enumerate() {
        let name = if chains.len() == 1 {
            "chain.csv".to_string()
        } else {
            format!("chain_{}.csv", k + 1)
        };
        out.write(&name, &chain_to_csv(chain.draws()))?;
    }
    out.write("summary.txt", &summary.to_table())?;
    out.write("summary.jsonl", &summary.to_json_lines()?)?;
    let diagnostics: Vec<_> = chains.iter().map(|c| &c.diagnostics).collect();
    out.write(
        "diagnostics.json",
        &(serde_json::to_string_pretty(&diagnostics)? + "\n"),
    )?;

    let mut m = manifest(
        "fit",
        settings.to_args(&a.input),
        serde_json::json!({ "settings": settings, "chains": configs }),
        settings.chains.iter().map(|c| c.0).collect(),
    );
    m.input = Some(InputRecord {
        path: a.input.clone(),
        sha256: sha256_hex(&bytes),
        arg_index: 1,
    });
    let held: u64 = chains
        .iter()
        .map(|c| c.diagnostics.alpha.held + c.diagnostics.beta.held)
        .sum();
    if held > 0 {
        m.notes.push(format!(
            "{held} shape-parameter updates held because the current value left the support of its refreshed conditional"
        ));
    }
    if summary.degenerate_hpd {
        m.notes
            .push("some HPD intervals are degenerate (too few draws)".into());
    }
    out.finish(m)
}

fn cmd_plot(a: PlotArgs) -> Result<()> {
    let bytes = fs::read(&a.chain)?;
    let draws = chain_from_csv(bytes.as_slice())?;
    let mut out = Output::create(&a.out)?;
    for which in Param::ALL {
        let name = which.name();
        let values: Vec<f64> = draws.iter().map(|d| d.get(which)).collect();
        let hist = plot::histogram(&values)?;
        out.write(&format!("trace_{name}.csv"), &plot::trace_csv(&values))?;
        out.write(&format!("hist_{name}.csv"), &hist.to_csv())?;
        out.write(
            &format!("trace_{name}.svg"),
            &plot::trace_svg(name, &values),
        )?;
        out.write(
            &format!("hist_{name}.svg"),
            &plot::histogram_svg(name, &hist),
        )?;
    }
    let path = a.chain.display().to_string();
    let mut m = manifest(
        "plot",
        vec!["plot".into(), path.clone()],
        serde_json::json!({ "max_bins": plot::MAX_BINS, "bin_rule": "freedman-diaconis" }),
        Vec::new(),
    );
    m.input = Some(InputRecord {
        path,
        sha256: sha256_hex(&bytes),
        arg_index: 1,
    });
    out.finish(m)
}

fn cmd_rerun(a: RerunArgs) -> Result<()> {
    let recorded: RunManifest = serde_json::from_slice(&fs::read(&a.manifest)?)?;
    let mut args = recorded.args.clone();
    if let Some(rec) = &recorded.input {
        let path = match &a.input {
            Some(p) => p.display().to_string(),
            None if rec.path == "-" => {
                return Err(Error::Config(
                    "input was read from stdin; pass --input".into(),
                ))
            }
            None => rec.path.clone(),
        };
        let digest = sha256_hex(&fs::read(&path)?);
        if digest != rec.sha256 {
            return Err(Error::InvalidSample(format!(
                "input `{path}` has digest {digest}, manifest records {}",
                rec.sha256
            )));
        }
        if rec.arg_index >= args.len() {
            return Err(Error::Config("manifest input index out of range".into()));
        }
        args[rec.arg_index] = path;
    }
    let argv = std::iter::once("cenrisk".to_string())
        .chain(args)
        .chain(["--out".to_string(), a.out.display().to_string()]);
    let cli = Cli::try_parse_from(argv)
        .map_err(|e| Error::Config(format!("manifest arguments rejected: {e}")))?;
    if matches!(cli.command, Command::Rerun(_)) {
        return Err(Error::Config("a manifest cannot replay rerun".into()));
    }
    dispatch(cli.command)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit_args(argv: &[&str]) -> FitArgs {
        let full = ["cenrisk", "fit", "data.csv"].iter().chain(argv).copied();
        match Cli::try_parse_from(full).unwrap().command {
            Command::Fit(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn config_parsing() {
        let m = parse_config("# comment\niterations = 500\nburn-in=100 # trailing\n\n").unwrap();
        assert_eq!(m["iterations"], "500");
        assert_eq!(m["burn_in"], "100");
        assert!(parse_config("nonsense").is_err());
    }

    #[test]
    fn flags_beat_config_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "iterations = 500\nthin = 5\ngamma = 0.1\n").unwrap();
        let mut a = fit_args(&["--iterations", "300"]);
        a.config = Some(cfg);
        let s = FitSettings::resolve(&a).unwrap();
        assert_eq!(s.iterations, 300);
        assert_eq!(s.burn_in, 60);
        assert_eq!(s.thin, 5);
        assert_eq!(s.gamma, 0.1);
        assert_eq!(s.widths, [1.0; 4]);
        assert_eq!(s.chains, vec![(1, 0)]);
    }

    #[test]
    fn seeds_and_chains() {
        let s = FitSettings::resolve(&fit_args(&["--seed", "9", "--chains", "3"])).unwrap();
        assert_eq!(s.chains, vec![(9, 0), (9, 1), (9, 2)]);
        let s = FitSettings::resolve(&fit_args(&["--seeds", "4,5"])).unwrap();
        assert_eq!(s.chains, vec![(4, 0), (5, 0)]);
        assert!(FitSettings::resolve(&fit_args(&["--seeds", "4,5", "--chains", "3"])).is_err());
        assert!(FitSettings::resolve(&fit_args(&["--width", "1,2"])).is_err());
        assert!(FitSettings::resolve(&fit_args(&["--burn-in", "20000"])).is_err());
        assert!(FitSettings::resolve(&fit_args(&["--gamma", "1.5"])).is_err());
        assert!(FitSettings::resolve(&fit_args(&["--init", "1,2,3"])).is_err());
    }

    #[test]
    fn resolved_args_round_trip() {
        let s = FitSettings::resolve(&fit_args(&[
            "--iterations",
            "700",
            "--width",
            "0.5,1,2,0.25",
            "--init",
            "1,0.5,2,0.3",
            "--seeds",
            "3,8",
        ]))
        .unwrap();
        let args = s.to_args("data.csv");
        let argv = std::iter::once("cenrisk".to_string()).chain(args);
        let Command::Fit(a) = Cli::try_parse_from(argv).unwrap().command else {
            unreachable!()
        };
        assert_eq!(FitSettings::resolve(&a).unwrap(), s);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
        assert_eq!(
            exit_code(&Error::MissingColumn {
                line: 1,
                name: "dftime".into()
            }),
            EXIT_DATA
        );
        assert_eq!(
            exit_code(&Error::PriorDegenerate(Param::Lambda2)),
            EXIT_DATA
        );
        let aborted = Error::ChainAborted {
            iteration: 3,
            source: Box::new(Error::InvalidCurrentPoint(1.0)),
        };
        assert_eq!(exit_code(&aborted), EXIT_NUMERIC);
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
