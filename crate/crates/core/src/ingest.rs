//! Follicular lymphoma data: parsing, cause coding and preparation of the
//! two analysis inputs, plus the canonical `time,cause,removed` dataset
//! format shared with the simulator.
//!
//! Two input layouts are accepted, both whitespace-delimited with a header:
//! the raw layout carries `resp`, `relsite`, `stat` and `dftime`, and the
//! cause is derived by [`compute_cause`]; the pre-coded layout carries
//! `dftime` and an already derived `cause` column (0, 1 or 2).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::likelihood::{ProgressiveSample, Record};
use crate::model::Cause;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CauseLabel {
    Censored,
    /// No treatment response or relapse.
    Disease,
    /// Death without relapse.
    CompetingDeath,
}

impl CauseLabel {
    pub fn value(self) -> u8 {
        match self {
            CauseLabel::Censored => 0,
            CauseLabel::Disease => 1,
            CauseLabel::CompetingDeath => 2,
        }
    }

    pub fn from_value(v: u8) -> Option<Self> {
        match v {
            0 => Some(CauseLabel::Censored),
            1 => Some(CauseLabel::Disease),
            2 => Some(CauseLabel::CompetingDeath),
            _ => None,
        }
    }

    pub fn failure(self) -> Option<Cause> {
        match self {
            CauseLabel::Censored => None,
            CauseLabel::Disease => Some(Cause::One),
            CauseLabel::CompetingDeath => Some(Cause::Two),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CauseSource {
    Raw {
        resp: String,
        /// Empty when no relapse site was recorded.
        relsite: String,
        stat: u8,
    },
    Coded(CauseLabel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FollicularRow {
    /// 1-based line in the source.
    pub line: usize,
    pub dftime: f64,
    pub source: CauseSource,
    /// Remaining columns, unparsed.
    pub extra: BTreeMap<String, String>,
}

/// `evcens = resp == "NR" || relsite != ""`,
/// `crcens = resp == "CR" && relsite == "" && stat == 1`;
/// cause 1 if `evcens`, else 2 if `crcens`, else 0.
pub fn compute_cause(row: &FollicularRow) -> CauseLabel {
    match &row.source {
        CauseSource::Coded(label) => *label,
        CauseSource::Raw {
            resp,
            relsite,
            stat,
        } => {
            let evcens = resp == "NR" || !relsite.is_empty();
            let crcens = resp == "CR" && relsite.is_empty() && *stat == 1;
            if evcens {
                CauseLabel::Disease
            } else if crcens {
                CauseLabel::CompetingDeath
            } else {
                CauseLabel::Censored
            }
        }
    }
}

/// Whitespace split that keeps double-quoted tokens together; `""` is an
/// empty token.
fn tokenize(line: &str) -> std::result::Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let Some(&c) = chars.peek() else { break };
        let mut tok = String::new();
        if c == '"' {
            chars.next();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => tok.push(ch),
                    None => return Err("unterminated quote".into()),
                }
            }
        } else {
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() {
                    break;
                }
                tok.push(ch);
                chars.next();
            }
        }
        out.push(tok);
    }
    Ok(out)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

enum Layout {
    Raw {
        resp: usize,
        relsite: usize,
        stat: usize,
    },
    Coded {
        cause: usize,
    },
}

/// Parse the follicular text format. Column order is taken from the header.
pub fn parse_dataset<R: Read>(source: R) -> Result<Vec<FollicularRow>> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines().enumerate();
    let (header_line, header) = loop {
        match lines.next() {
            None => return Err(Error::MissingHeader),
            Some((i, line)) => {
                let line = line?;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    continue;
                }
                let cols = tokenize(trimmed).map_err(|m| parse_err(i + 1, m))?;
                break (i + 1, cols);
            }
        }
    };
    let find = |name: &str| header.iter().position(|h| h == name);
    let dftime = find("dftime").ok_or_else(|| Error::MissingColumn {
        line: header_line,
        name: "dftime".into(),
    })?;
    let raw_cols = [find("resp"), find("relsite"), find("stat")];
    let layout = match (raw_cols, find("cause")) {
        ([Some(resp), Some(relsite), Some(stat)], _) => Layout::Raw {
            resp,
            relsite,
            stat,
        },
        ([None, None, None], Some(cause)) => Layout::Coded { cause },
        _ => {
            let missing = ["resp", "relsite", "stat"]
                .iter()
                .zip(raw_cols)
                .find(|(_, c)| c.is_none())
                .map(|(n, _)| *n)
                .unwrap_or("resp");
            return Err(Error::MissingColumn {
                line: header_line,
                name: missing.into(),
            });
        }
    };
    let used: Vec<usize> = match layout {
        Layout::Raw {
            resp,
            relsite,
            stat,
        } => vec![dftime, resp, relsite, stat],
        Layout::Coded { cause } => vec![dftime, cause],
    };

    let mut rows = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks = tokenize(trimmed).map_err(|m| parse_err(line_no, m))?;
        if toks.len() != header.len() {
            return Err(parse_err(
                line_no,
                format!(
                    "expected {} fields (header on line {header_line}), found {}",
                    header.len(),
                    toks.len()
                ),
            ));
        }
        let t: f64 = toks[dftime].parse().map_err(|_| {
            parse_err(
                line_no,
                format!("dftime `{}` is not a number", toks[dftime]),
            )
        })?;
        if !(t.is_finite() && t > 0.0) {
            return Err(parse_err(line_no, format!("dftime {t} must be positive")));
        }
        let source = match layout {
            Layout::Raw {
                resp,
                relsite,
                stat,
            } => {
                let stat_val: u8 = match toks[stat].as_str() {
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(parse_err(line_no, format!("stat `{other}` is not 0 or 1")))
                    }
                };
                let site = &toks[relsite];
                CauseSource::Raw {
                    resp: toks[resp].clone(),
                    relsite: if site == "NA" {
                        String::new()
                    } else {
                        site.clone()
                    },
                    stat: stat_val,
                }
            }
            Layout::Coded { cause } => {
                let label = toks[cause]
                    .parse::<u8>()
                    .ok()
                    .and_then(CauseLabel::from_value)
                    .ok_or_else(|| {
                        parse_err(line_no, format!("cause `{}` is not 0, 1 or 2", toks[cause]))
                    })?;
                CauseSource::Coded(label)
            }
        };
        let extra = header
            .iter()
            .enumerate()
            .filter(|(j, _)| !used.contains(j))
            .map(|(j, name)| (name.clone(), toks[j].clone()))
            .collect();
        rows.push(FollicularRow {
            line: line_no,
            dftime: t,
            source,
            extra,
        });
    }
    Ok(rows)
}

/// Counts of (censored, cause 1, cause 2).
pub fn tabulate(rows: &[FollicularRow]) -> [usize; 3] {
    let mut counts = [0; 3];
    for r in rows {
        counts[compute_cause(r).value() as usize] += 1;
    }
    counts
}

/// A prepared sample with the adjustments made on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub sample: ProgressiveSample,
    /// Failure times nudged up to break exact ties.
    pub tie_adjustments: usize,
    /// Censored rows before the first failure, folded into `R_1`.
    pub leading_censored: usize,
}

fn prepare(rows: &[FollicularRow], keep_censored: bool) -> Result<Prepared> {
    let mut items: Vec<(f64, CauseLabel)> = rows
        .iter()
        .map(|r| (r.dftime, compute_cause(r)))
        .filter(|(_, c)| keep_censored || *c != CauseLabel::Censored)
        .collect();
    // Stable: within a tie, failures first, then file order.
    items.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| (a.1 == CauseLabel::Censored).cmp(&(b.1 == CauseLabel::Censored)))
    });
    let mut records: Vec<Record> = Vec::new();
    let mut leading = 0;
    let mut ties = 0;
    for (t, label) in &items {
        match label.failure() {
            Some(cause) => {
                let mut time = *t;
                if let Some(prev) = records.last() {
                    if time <= prev.time {
                        time = prev.time.next_up();
                        ties += 1;
                    }
                }
                records.push(Record::new(time, cause, 0));
            }
            None => match records.last_mut() {
                Some(last) => last.removed += 1,
                None => leading += 1,
            },
        }
    }
    if records.is_empty() {
        return Err(Error::NoFailures);
    }
    records[0].removed += leading as u32;
    if ties > 0 {
        warn!("{ties} tied failure times moved up by one ulp");
    }
    if leading > 0 {
        warn!("{leading} censored rows before the first failure folded into R_1");
    }
    let n = items.len();
    Ok(Prepared {
        sample: ProgressiveSample::new(records, n)?,
        tie_adjustments: ties,
        leading_censored: leading,
    })
}

/// Failures only, sorted by time, no removals.
pub fn prepare_case1(rows: &[FollicularRow]) -> Result<Prepared> {
    prepare(rows, false)
}

/// All rows sorted by time; each run of censored rows after a failure
/// becomes that failure's removal count.
pub fn prepare_case2(rows: &[FollicularRow]) -> Result<Prepared> {
    prepare(rows, true)
}

fn format_time(t: f64) -> String {
    if (1e-4..1e15).contains(&t) {
        format!("{t}")
    } else {
        format!("{t:e}")
    }
}

/// Canonical dataset text: `# n=<n>`, header `time,cause,removed`, one
/// record per line in increasing time.
pub fn write_dataset(sample: &ProgressiveSample) -> String {
    let mut out = format!("# n={}\ntime,cause,removed\n", sample.n());
    for r in sample.records() {
        let _ = writeln!(
            out,
            "{},{},{}",
            format_time(r.time),
            r.cause.label(),
            r.removed
        );
    }
    out
}

pub fn read_dataset<R: Read>(source: R) -> Result<ProgressiveSample> {
    let reader = BufReader::new(source);
    let mut n: Option<usize> = None;
    let mut columns: Option<[usize; 3]> = None;
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("n=") {
                n = Some(
                    v.trim()
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad cohort size `{v}`")))?,
                );
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let Some(cols) = columns else {
            let pos = |name: &str| {
                fields
                    .iter()
                    .position(|f| *f == name)
                    .ok_or_else(|| Error::MissingColumn {
                        line: line_no,
                        name: name.into(),
                    })
            };
            columns = Some([pos("time")?, pos("cause")?, pos("removed")?]);
            continue;
        };
        if fields.len() < 3 {
            return Err(parse_err(
                line_no,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        let time: f64 = fields[cols[0]].parse().map_err(|_| {
            parse_err(
                line_no,
                format!("time `{}` is not a number", fields[cols[0]]),
            )
        })?;
        let cause = fields[cols[1]]
            .parse::<u8>()
            .ok()
            .and_then(Cause::from_label)
            .ok_or_else(|| {
                parse_err(
                    line_no,
                    format!("cause `{}` is not 1 or 2", fields[cols[1]]),
                )
            })?;
        let removed: u32 = fields[cols[2]].parse().map_err(|_| {
            parse_err(
                line_no,
                format!("removed `{}` is not a count", fields[cols[2]]),
            )
        })?;
        records.push(Record::new(time, cause, removed));
    }
    if columns.is_none() {
        return Err(Error::MissingHeader);
    }
    match n {
        Some(n) => ProgressiveSample::new(records, n),
        None => ProgressiveSample::from_records(records),
    }
}
