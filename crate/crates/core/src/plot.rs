//! Trace and histogram artifacts for a chain: CSV tables plus small
//! self-contained SVG renderings.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::stats::sorted_quantile;

/// Upper bound on histogram bins. Heavy-tailed chains (the shape parameter
/// drifting over many decades) would otherwise ask for millions.
pub const MAX_BINS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `edges.len() == counts.len() + 1`; the last bin is closed on the right.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", self.edges[i], self.edges[i + 1], c);
        }
        out
    }
}

/// Number of bins from the Freedman–Diaconis width `2 IQR n^(-1/3)`, falling
/// back to Sturges when the IQR vanishes but the range does not.
pub fn freedman_diaconis_bins(sorted: &[f64]) -> usize {
    let n = sorted.len();
    let range = sorted[n - 1] - sorted[0];
    if !(range > 0.0) {
        return 1;
    }
    let iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
    let bins = if iqr > 0.0 {
        let width = 2.0 * iqr / (n as f64).cbrt();
        (range / width).ceil()
    } else {
        (n as f64).log2().ceil() + 1.0
    };
    (bins as usize).clamp(1, MAX_BINS)
}

pub fn histogram(values: &[f64]) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyChain);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSample("non-finite value in chain".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = freedman_diaconis_bins(&sorted);
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    let width = (hi - lo) / k as f64;
    let mut edges: Vec<f64> = (0..k).map(|i| lo + i as f64 * width).collect();
    edges.push(hi);
    let mut counts = vec![0u64; k];
    for &v in &sorted {
        let i = if width > 0.0 {
            (((v - lo) / width) as usize).min(k - 1)
        } else {
            0
        };
        counts[i] += 1;
    }
    Ok(Histogram { edges, counts })
}

pub fn trace_csv(values: &[f64]) -> String {
    let mut out = String::from("iteration,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, v);
    }
    out
}

const W: f64 = 640.0;
const H: f64 = 320.0;
const PAD: f64 = 40.0;
const MAX_TRACE_POINTS: usize = 4000;

fn svg_frame(title: &str, body: &str, lo: f64, hi: f64) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            "<text x=\"{cx}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n",
            "<line x1=\"{p}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
            "<line x1=\"{p}\" y1=\"{p}\" x2=\"{p}\" y2=\"{b}\" stroke=\"black\"/>\n",
            "<text x=\"{p}\" y=\"{lb}\" font-family=\"sans-serif\" font-size=\"10\">{lo:.4e}</text>\n",
            "<text x=\"{r}\" y=\"{lb}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{hi:.4e}</text>\n",
            "{body}</svg>\n"
        ),
        w = W,
        h = H,
        cx = W / 2.0,
        p = PAD,
        r = W - PAD,
        b = H - PAD,
        lb = H - PAD + 14.0,
        title = title,
        lo = lo,
        hi = hi,
        body = body,
    )
}

/// Value against iteration as a polyline. Long chains are decimated for
/// drawing only.
pub fn trace_svg(name: &str, values: &[f64]) -> String {
    let n = values.len();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let span = if hi > lo { hi - lo } else { 1.0 };
    let stride = n.div_ceil(MAX_TRACE_POINTS).max(1);
    let mut points = String::new();
    for i in (0..n).step_by(stride) {
        let x = PAD + (W - 2.0 * PAD) * i as f64 / (n.max(2) - 1) as f64;
        let y = H - PAD - (H - 2.0 * PAD) * (values[i] - lo) / span;
        let _ = write!(points, "{x:.2},{y:.2} ");
    }
    let body = format!(
        "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"0.6\" points=\"{}\"/>\n",
        points.trim_end()
    );
    svg_frame(&format!("trace of {name}"), &body, 1.0, n as f64)
}

pub fn histogram_svg(name: &str, hist: &Histogram) -> String {
    let k = hist.counts.len();
    let top = hist.counts.iter().copied().max().unwrap_or(1).max(1) as f64;
    let bar = (W - 2.0 * PAD) / k as f64;
    let mut body = String::new();
    for (i, &c) in hist.counts.iter().enumerate() {
        let h = (H - 2.0 * PAD) * c as f64 / top;
        let _ = writeln!(
            body,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"steelblue\" stroke=\"white\" stroke-width=\"0.3\"/>",
            PAD + i as f64 * bar,
            H - PAD - h,
            bar,
            h
        );
    }
    svg_frame(
        &format!("histogram of {name}"),
        &body,
        hist.edges[0],
        hist.edges[k],
    )
}
