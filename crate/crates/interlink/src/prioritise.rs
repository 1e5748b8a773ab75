//! Cluster-diversified prioritisation of synergy-dominated indicators.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::centrality::CentralityRecord;
use crate::classify::{ClassLabel, ClassificationRecord};
use crate::error::{Error, Result};
use crate::flowclust::Partition;

/// Where a pick came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PickCategory {
    /// Best synergy-dominated member of a multi-indicator cluster.
    Cluster,
    /// Synergy-dominated indicator forming a single-indicator cluster.
    Isolated,
}

impl PickCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            PickCategory::Cluster => "cluster",
            PickCategory::Isolated => "isolated",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Pick {
    pub category: PickCategory,
    pub module: usize,
    pub id: String,
    pub sdg: Option<u8>,
    pub opsahl_score: f64,
    pub rationale: String,
}

/// The prioritised indicator set: one pick per multi-indicator cluster with
/// a synergy-dominated member, plus every isolated synergy-dominated
/// indicator.
#[derive(Debug, Clone, Serialize)]
pub struct PrioritisedSet {
    pub picks: Vec<Pick>,
    /// Multi-indicator clusters with no synergy-dominated member.
    pub skipped_clusters: Vec<usize>,
}

/// Select the prioritised set from the strong-synergy partition.
///
/// Per multi-indicator cluster: the synergy-dominated member with the
/// highest Opsahl score (ties by id). Singleton-cluster nodes are appended
/// when synergy-dominated; trade-off-dominated and unclassified nodes never
/// appear. Cluster picks come first by module index, then isolated picks by
/// (sdg, id).
pub fn prioritise(
    partition: &Partition,
    classes: &[ClassificationRecord],
    centrality: &[CentralityRecord],
) -> Result<PrioritisedSet> {
    let class_of: BTreeMap<&str, &ClassificationRecord> =
        classes.iter().map(|c| (c.id.as_str(), c)).collect();
    let score_of: BTreeMap<&str, f64> = centrality
        .iter()
        .map(|c| (c.id.as_str(), c.score))
        .collect();

    let mut cluster_picks: Vec<Pick> = Vec::new();
    let mut isolated_picks: Vec<Pick> = Vec::new();
    let mut skipped_clusters = Vec::new();

    for (module, members) in partition.modules().into_iter().enumerate() {
        let mut synergy_members: Vec<(&str, Option<u8>, f64)> = Vec::new();
        let mut total = 0usize;
        for idx in &members {
            let id = partition.ids[*idx].as_str();
            let class = class_of.get(id).ok_or_else(|| {
                Error::Consistency(format!("node `{id}` missing from classification"))
            })?;
            total += 1;
            if class.label == ClassLabel::SynergyDominated {
                // A synergy-dominated node with no positive out-degree
                // legitimately scores 0; it is kept and flagged below.
                let score = score_of.get(id).copied().unwrap_or(0.0);
                synergy_members.push((id, class.sdg, score));
            }
        }

        if total >= 2 {
            // multi-indicator cluster: at most one pick
            if synergy_members.is_empty() {
                skipped_clusters.push(module);
                continue;
            }
            synergy_members.sort_by(|a, b| {
                b.2.partial_cmp(&a.2)
                    .expect("scores are finite")
                    .then_with(|| a.0.cmp(b.0))
            });
            let (id, sdg, score) = synergy_members[0];
            cluster_picks.push(Pick {
                category: PickCategory::Cluster,
                module,
                id: id.to_string(),
                sdg,
                opsahl_score: score,
                rationale: format!(
                    "highest Opsahl out-centrality among {} synergy-dominated member(s) of cluster {}",
                    synergy_members.len(),
                    module
                ),
            });
        } else if let Some(&(id, sdg, score)) = synergy_members.first() {
            let rationale = if score == 0.0 {
                "isolated synergy-dominated indicator (zero positive out-degree)".to_string()
            } else {
                "isolated synergy-dominated indicator".to_string()
            };
            isolated_picks.push(Pick {
                category: PickCategory::Isolated,
                module,
                id: id.to_string(),
                sdg,
                opsahl_score: score,
                rationale,
            });
        }
    }

    cluster_picks.sort_by_key(|p| p.module);
    isolated_picks.sort_by(|a, b| {
        let ka = a.sdg.unwrap_or(u8::MAX);
        let kb = b.sdg.unwrap_or(u8::MAX);
        ka.cmp(&kb).then_with(|| a.id.cmp(&b.id))
    });
    cluster_picks.extend(isolated_picks);

    Ok(PrioritisedSet {
        picks: cluster_picks,
        skipped_clusters,
    })
}

/// Cluster-membership spread of the top-ranked indicators.
#[derive(Debug, Clone, Serialize)]
pub struct RedundancyReport {
    pub top_n: usize,
    /// Module index -> how many of the top n land there.
    pub membership: BTreeMap<usize, usize>,
    /// Share of the top n that sits in the most-populated cluster.
    pub concentration: f64,
}

/// Where do the top `top_n` ranked indicators live in the partition?
pub fn redundancy_report(
    ranking: &[CentralityRecord],
    partition: &Partition,
    top_n: usize,
) -> Result<RedundancyReport> {
    if top_n > ranking.len() {
        return Err(Error::Parameter {
            name: "top-n",
            value: top_n as f64,
            expected: "at most the ranking length",
        });
    }
    let mut membership: BTreeMap<usize, usize> = BTreeMap::new();
    for rec in &ranking[..top_n] {
        let module = partition.module_of(&rec.id).ok_or_else(|| {
            Error::Consistency(format!("ranked node `{}` missing from partition", rec.id))
        })?;
        *membership.entry(module).or_insert(0) += 1;
    }
    let modal = membership.values().copied().max().unwrap_or(0);
    let concentration = if top_n == 0 {
        0.0
    } else {
        modal as f64 / top_n as f64
    };
    Ok(RedundancyReport {
        top_n,
        membership,
        concentration,
    })
}
