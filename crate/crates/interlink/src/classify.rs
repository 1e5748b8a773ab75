//! Synergy / trade-off classification from the balance of outgoing strengths.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::InterlinkNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassLabel {
    SynergyDominated,
    TradeOffDominated,
    /// No outgoing edges: the strength shares are 0/0, so the node gets its
    /// own label instead of a forced binary class.
    UnclassifiedNoOutflow,
}

impl ClassLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::SynergyDominated => "synergy-dominated",
            ClassLabel::TradeOffDominated => "trade-off-dominated",
            ClassLabel::UnclassifiedNoOutflow => "unclassified-no-outflow",
        }
    }
}

/// Positive/negative outgoing strength shares and the resulting label.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationRecord {
    pub id: String,
    pub sdg: Option<u8>,
    /// Share of total absolute outgoing weight that is positive.
    pub s_plus: f64,
    pub s_minus: f64,
    pub k_out: usize,
    pub label: ClassLabel,
}

/// Per-SDG synergy / trade-off tallies (the polar-plot summary).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SdgTally {
    pub synergy: usize,
    pub tradeoff: usize,
    pub unclassified: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassificationSummary {
    pub synergy: usize,
    pub tradeoff: usize,
    pub unclassified: usize,
    /// Keyed by SDG number; nodes without metadata tally under `None`.
    pub by_sdg: BTreeMap<Option<u8>, SdgTally>,
}

/// Classify one node from the full signed network.
///
/// `s_plus >= 0.5` (inclusive) marks synergy domination.
pub fn classify_node(g: &InterlinkNetwork, id: &str) -> Result<ClassificationRecord> {
    let idx = g
        .node_index(id)
        .ok_or_else(|| Error::UnknownNode(id.to_string()))?;
    Ok(classify_at(g, idx))
}

fn classify_at(g: &InterlinkNetwork, idx: usize) -> ClassificationRecord {
    let strength = g.degree_and_strength_at(idx);
    let node = g.node(idx);
    let total = strength.s_out_pos + strength.s_out_neg;
    let (s_plus, s_minus, label) = if strength.k_out == 0 {
        (0.0, 0.0, ClassLabel::UnclassifiedNoOutflow)
    } else {
        let s_plus = strength.s_out_pos / total;
        let s_minus = strength.s_out_neg / total;
        let label = if s_plus >= 0.5 {
            ClassLabel::SynergyDominated
        } else {
            ClassLabel::TradeOffDominated
        };
        (s_plus, s_minus, label)
    };
    ClassificationRecord {
        id: node.id.clone(),
        sdg: node.sdg,
        s_plus,
        s_minus,
        k_out: strength.k_out,
        label,
    }
}

/// Classify every node and tally labels per SDG.
pub fn classify_all(g: &InterlinkNetwork) -> (Vec<ClassificationRecord>, ClassificationSummary) {
    let mut records = Vec::with_capacity(g.node_count());
    let mut summary = ClassificationSummary::default();
    for idx in 0..g.node_count() {
        let rec = classify_at(g, idx);
        let tally = summary.by_sdg.entry(rec.sdg).or_default();
        match rec.label {
            ClassLabel::SynergyDominated => {
                summary.synergy += 1;
                tally.synergy += 1;
            }
            ClassLabel::TradeOffDominated => {
                summary.tradeoff += 1;
                tally.tradeoff += 1;
            }
            ClassLabel::UnclassifiedNoOutflow => {
                summary.unclassified += 1;
                tally.unclassified += 1;
            }
        }
        records.push(rec);
    }
    (records, summary)
}
