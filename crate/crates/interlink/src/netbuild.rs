//! Network estimation: pairwise lagged correlations, the significance gate,
//! and the dominance rule for bidirectional conflicts.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, InterlinkNetwork, NodeSpec, Resolution};
use crate::ingest::Panel;
use crate::stats;

/// Correlation estimator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMethod {
    #[default]
    Pearson,
    Spearman,
}

impl CorrelationMethod {
    pub fn parse_flag(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" => Ok(CorrelationMethod::Pearson),
            "spearman" => Ok(CorrelationMethod::Spearman),
            _ => Err(Error::Load {
                location: format!("--method {s}"),
                message: "expected `pearson` or `spearman`".to_string(),
            }),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CorrelationMethod::Pearson => "pearson",
            CorrelationMethod::Spearman => "spearman",
        }
    }
}

/// A lagged correlation estimate for one ordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedEstimate {
    pub source: String,
    pub target: String,
    /// Correlation of source values at `t - lag` with target values at `t`.
    pub r: f64,
    /// Number of aligned pairs entering the estimate.
    pub n: usize,
    /// Two-sided p-value from the t test with `n - 2` degrees of freedom.
    pub p: f64,
}

/// An ordered pair skipped because one aligned slice had zero variance.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedPair {
    pub source: String,
    pub target: String,
    pub side: &'static str,
}

/// Correlation of `x[t - lag]` with `y[t]` over the `len - lag` aligned pairs.
///
/// Returns `(r, n)`. Fails when the slices differ in length, fewer than 3
/// aligned pairs remain, or either aligned slice has zero variance.
pub fn lagged_correlation(x: &[f64], y: &[f64], lag: usize) -> Result<(f64, usize)> {
    lagged_correlation_with(x, y, lag, CorrelationMethod::Pearson)
}

pub fn lagged_correlation_with(
    x: &[f64],
    y: &[f64],
    lag: usize,
    method: CorrelationMethod,
) -> Result<(f64, usize)> {
    if x.len() != y.len() {
        return Err(Error::Contract(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if lag == 0 || lag >= x.len() {
        return Err(Error::Parameter {
            name: "lag",
            value: lag as f64,
            expected: "a positive integer smaller than the series length",
        });
    }
    let n = x.len() - lag;
    if n < 3 {
        return Err(Error::InsufficientSample { n });
    }
    let xs = &x[..n];
    let ys = &y[lag..];
    let r = match method {
        CorrelationMethod::Pearson => stats::pearson(xs, ys),
        CorrelationMethod::Spearman => stats::spearman(xs, ys),
    };
    match r {
        Some(r) => Ok((r, n)),
        None => {
            // Report which slice was flat; the source slice takes precedence.
            let side = if slice_variance_zero(xs) {
                "source"
            } else {
                "target"
            };
            Err(Error::DegenerateCorrelation { side })
        }
    }
}

fn slice_variance_zero(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// Two-sided p-value for a correlation `r` over `n` aligned pairs.
pub fn p_value(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InsufficientSample { n });
    }
    if r.abs() > 1.0 {
        return Err(Error::Parameter {
            name: "r",
            value: r,
            expected: "a correlation in [-1, 1]",
        });
    }
    Ok(stats::correlation_p_value(r, n))
}

/// Estimate every ordered pair of a filtered panel at the given lag.
///
/// Returns all estimates (significant or not) sorted by (source, target),
/// plus the degenerate pairs that were skipped. Sorting makes the output
/// independent of panel column order.
pub fn estimate_all_pairs(
    panel: &Panel,
    lag: usize,
    method: CorrelationMethod,
) -> Result<(Vec<LaggedEstimate>, Vec<SkippedPair>)> {
    let len = panel.window.len();
    if lag == 0 || lag >= len || len - lag < 3 {
        return Err(Error::InsufficientData(format!(
            "window of {len} year(s) leaves {} aligned pair(s) at lag {lag}; need at least 3",
            len.saturating_sub(lag)
        )));
    }
    let dense: Vec<(String, Vec<f64>)> = panel
        .series
        .iter()
        .map(|s| Ok((s.id.clone(), s.dense()?)))
        .collect::<Result<_>>()?;
    let k = dense.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();

    // Each pair is a pure function of two immutable series; results are
    // collected in pair-index order, so the outcome matches sequential runs.
    let outcomes: Vec<std::result::Result<LaggedEstimate, SkippedPair>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (src, x) = &dense[i];
            let (dst, y) = &dense[j];
            match lagged_correlation_with(x, y, lag, method) {
                Ok((r, n)) => Ok(LaggedEstimate {
                    source: src.clone(),
                    target: dst.clone(),
                    r,
                    n,
                    p: stats::correlation_p_value(r, n),
                }),
                Err(Error::DegenerateCorrelation { side }) => Err(SkippedPair {
                    source: src.clone(),
                    target: dst.clone(),
                    side,
                }),
                Err(e) => panic!("pairwise estimation failed: {e}"),
            }
        })
        .collect();

    let mut estimates = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(est) => estimates.push(est),
            Err(skip) => skipped.push(skip),
        }
    }
    estimates.sort_by(|a, b| {
        (a.source.as_str(), a.target.as_str()).cmp(&(b.source.as_str(), b.target.as_str()))
    });
    Ok((estimates, skipped))
}

/// Significant ordered-pair estimates: plain `p < threshold` gate.
pub fn all_pairs(
    panel: &Panel,
    lag: usize,
    threshold: f64,
    method: CorrelationMethod,
) -> Result<(Vec<LaggedEstimate>, Vec<SkippedPair>)> {
    check_threshold(threshold)?;
    let (estimates, skipped) = estimate_all_pairs(panel, lag, method)?;
    let significant = estimates.into_iter().filter(|e| e.p < threshold).collect();
    Ok((significant, skipped))
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Parameter {
            name: "sig",
            value: threshold,
            expected: "a significance level in (0, 1]",
        });
    }
    Ok(())
}

/// Benjamini-Hochberg gate at level `q` over the full estimate set.
///
/// Keeps estimates with p at or below the largest p(k) satisfying
/// p(k) <= k/m * q; returns an empty set when none qualifies.
pub fn benjamini_hochberg(estimates: &[LaggedEstimate], q: f64) -> Result<Vec<LaggedEstimate>> {
    check_threshold(q)?;
    let m = estimates.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut ps: Vec<f64> = estimates.iter().map(|e| e.p).collect();
    ps.sort_by(|a, b| a.partial_cmp(b).expect("p-values are finite"));
    let mut cutoff = None;
    for (k, &p) in ps.iter().enumerate() {
        if p <= (k + 1) as f64 / m as f64 * q {
            cutoff = Some(p);
        }
    }
    Ok(match cutoff {
        None => Vec::new(),
        Some(c) => estimates.iter().filter(|e| e.p <= c).cloned().collect(),
    })
}

/// Resolve bidirectional significance conflicts by keeping the direction
/// with the larger |r|; exactly equal |r| keeps both, tagged `tie-kept`.
pub fn dominance_resolve(estimates: Vec<LaggedEstimate>) -> Vec<Edge> {
    let mut reverse: HashMap<(&str, &str), f64> = HashMap::with_capacity(estimates.len());
    for e in &estimates {
        reverse.insert((e.source.as_str(), e.target.as_str()), e.r);
    }
    let mut edges = Vec::with_capacity(estimates.len());
    for e in &estimates {
        let resolution = match reverse.get(&(e.target.as_str(), e.source.as_str())) {
            None => Resolution::Unopposed,
            Some(&back) => {
                // Exact floating comparison: the rule is stated at equality,
                // and widening the band would silently change topology.
                if e.r.abs() > back.abs() {
                    Resolution::Dominant
                } else if e.r.abs() == back.abs() {
                    Resolution::TieKept
                } else {
                    continue;
                }
            }
        };
        edges.push(Edge {
            source: e.source.clone(),
            target: e.target.clone(),
            weight: e.r,
            p: e.p,
            resolution,
        });
    }
    edges
}

/// Assemble the interlinkage network from resolved edges over the full
/// indicator set (isolates included).
pub fn build_network(nodes: Vec<NodeSpec>, edges: Vec<Edge>) -> Result<InterlinkNetwork> {
    InterlinkNetwork::build(nodes, edges)
}

/// Node specs carried over from a panel (id, label, sdg).
pub fn panel_nodes(panel: &Panel) -> Vec<NodeSpec> {
    panel
        .series
        .iter()
        .map(|s| NodeSpec {
            id: s.id.clone(),
            label: s.label.clone(),
            sdg: s.sdg,
        })
        .collect()
}
