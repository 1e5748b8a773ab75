//! Directed weighted interlinkage network: node registry, edge storage with
//! provenance, subnetwork extraction, and the dense weight matrix.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// How a bidirectional significance conflict was settled for an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Resolution {
    /// Only this direction was significant.
    Unopposed,
    /// Both directions were significant; this one had the larger |r|.
    Dominant,
    /// Both directions were significant with exactly equal |r|; both kept.
    TieKept,
}

impl Resolution {
    pub fn as_str(&self) -> &'static str {
        match self {
            Resolution::Unopposed => "unopposed",
            Resolution::Dominant => "dominant",
            Resolution::TieKept => "tie-kept",
        }
    }
}

/// A directed weighted edge between two indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: String,
    pub target: String,
    /// Lagged correlation in [-1, 1]; never zero for a stored edge.
    pub weight: f64,
    pub p: f64,
    pub resolution: Resolution,
}

/// Node identity plus optional reporting metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: String,
    pub label: Option<String>,
    pub sdg: Option<u8>,
}

impl NodeSpec {
    pub fn bare(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            label: None,
            sdg: None,
        }
    }
}

/// Immutable directed weighted network over a fixed node set.
///
/// Isolates are first-class: subnetwork extraction keeps the full node set.
#[derive(Debug, Clone)]
pub struct InterlinkNetwork {
    nodes: Vec<NodeSpec>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

/// Out-degree and the signed decomposition of out-strength for one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutStrength {
    pub k_out: usize,
    pub s_out_signed: f64,
    pub s_out_pos: f64,
    pub s_out_neg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignFilter {
    /// Keep strictly positive weights only.
    PositiveOnly,
    /// Keep both signs, filtered on |weight|.
    All,
}

/// Declarative subnetwork extraction: which edge signs survive and the
/// minimum (absolute) weight they need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubnetworkSpec {
    pub sign: SignFilter,
    pub min_weight: f64,
}

impl SubnetworkSpec {
    /// G+: positive edges of any strength.
    pub fn positive() -> Self {
        Self {
            sign: SignFilter::PositiveOnly,
            min_weight: 0.0,
        }
    }

    /// G+_strong at the given threshold.
    pub fn strong(min_weight: f64) -> Self {
        Self {
            sign: SignFilter::PositiveOnly,
            min_weight,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.min_weight) {
            return Err(Error::Parameter {
                name: "min_weight",
                value: self.min_weight,
                expected: "a threshold in [0, 1]",
            });
        }
        Ok(())
    }

    fn keeps(&self, weight: f64) -> bool {
        match self.sign {
            SignFilter::PositiveOnly => weight > 0.0 && weight >= self.min_weight,
            SignFilter::All => weight.abs() >= self.min_weight,
        }
    }
}

impl InterlinkNetwork {
    /// Assemble a network, checking the structural invariants: known
    /// endpoints, no self-loops, no duplicate (source, target), no
    /// zero-weight edges.
    pub fn build(nodes: Vec<NodeSpec>, edges: Vec<Edge>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.id.clone(), i).is_some() {
                return Err(Error::Consistency(format!(
                    "duplicate node id `{}`",
                    node.id
                )));
            }
        }
        let mut seen_pairs = HashMap::new();
        let mut out_adj = vec![Vec::new(); nodes.len()];
        let mut in_adj = vec![Vec::new(); nodes.len()];
        for (e_idx, edge) in edges.iter().enumerate() {
            let s = *index.get(&edge.source).ok_or_else(|| {
                Error::Consistency(format!("edge references unknown node `{}`", edge.source))
            })?;
            let t = *index.get(&edge.target).ok_or_else(|| {
                Error::Consistency(format!("edge references unknown node `{}`", edge.target))
            })?;
            if s == t {
                return Err(Error::Consistency(format!(
                    "self-loop on `{}`",
                    edge.source
                )));
            }
            if edge.weight == 0.0 {
                return Err(Error::Consistency(format!(
                    "zero-weight edge {} -> {}",
                    edge.source, edge.target
                )));
            }
            if seen_pairs.insert((s, t), e_idx).is_some() {
                return Err(Error::Consistency(format!(
                    "duplicate edge {} -> {}",
                    edge.source, edge.target
                )));
            }
            out_adj[s].push(e_idx);
            in_adj[t].push(e_idx);
        }
        Ok(Self {
            nodes,
            index,
            edges,
            out_adj,
            in_adj,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, idx: usize) -> &NodeSpec {
        &self.nodes[idx]
    }

    pub fn out_edges(&self, idx: usize) -> impl Iterator<Item = &Edge> {
        self.out_adj[idx].iter().map(move |&e| &self.edges[e])
    }

    pub fn in_edges(&self, idx: usize) -> impl Iterator<Item = &Edge> {
        self.in_adj[idx].iter().map(move |&e| &self.edges[e])
    }

    /// True when the node has neither incoming nor outgoing edges.
    pub fn is_isolate(&self, idx: usize) -> bool {
        self.out_adj[idx].is_empty() && self.in_adj[idx].is_empty()
    }

    pub fn positive_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.weight > 0.0).count()
    }

    pub fn negative_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.weight < 0.0).count()
    }

    /// Extract the subnetwork a spec describes: the full node set plus
    /// every edge the spec keeps.
    pub fn subnetwork(&self, spec: &SubnetworkSpec) -> Result<Self> {
        spec.validate()?;
        let edges = self
            .edges
            .iter()
            .filter(|e| spec.keeps(e.weight))
            .cloned()
            .collect();
        Ok(Self::build(self.nodes.clone(), edges).expect("subnetwork of a valid network is valid"))
    }

    /// G+: same node set, only strictly positive-weight edges.
    pub fn positive_subnetwork(&self) -> Self {
        self.subnetwork(&SubnetworkSpec::positive())
            .expect("the positive spec is always valid")
    }

    /// G+_strong: edges with weight >= `tau` (inclusive), full node set kept.
    ///
    /// Callers must pass a positive-only network; `tau` must lie in (0, 1].
    pub fn strong_subnetwork(&self, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::Parameter {
                name: "strong-threshold",
                value: tau,
                expected: "a value in (0, 1]",
            });
        }
        if let Some(e) = self.edges.iter().find(|e| e.weight <= 0.0) {
            return Err(Error::Contract(format!(
                "strong_subnetwork expects a positive network, found {} -> {} with weight {}",
                e.source, e.target, e.weight
            )));
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.weight >= tau)
            .cloned()
            .collect();
        Ok(Self::build(self.nodes.clone(), edges).expect("subnetwork of a valid network is valid"))
    }

    /// Node indices ordered by ascending SDG then id; nodes without an SDG
    /// sort after SDG 17. This is the heat-map block order.
    pub fn ordered_indices(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| {
            let ka = self.nodes[a].sdg.unwrap_or(u8::MAX);
            let kb = self.nodes[b].sdg.unwrap_or(u8::MAX);
            ka.cmp(&kb)
                .then_with(|| self.nodes[a].id.cmp(&self.nodes[b].id))
        });
        order
    }

    /// Dense weight matrix in SDG-then-id order. `matrix[i][j]` is the weight
    /// of `ids[i] -> ids[j]`, or 0 when no such edge exists.
    pub fn weight_matrix(&self) -> WeightMatrix {
        let order = self.ordered_indices();
        let pos_of: HashMap<usize, usize> =
            order.iter().enumerate().map(|(p, &n)| (n, p)).collect();
        let n = order.len();
        let mut matrix = vec![vec![0.0; n]; n];
        for edge in &self.edges {
            let s = pos_of[&self.index[&edge.source]];
            let t = pos_of[&self.index[&edge.target]];
            matrix[s][t] = edge.weight;
        }
        let ids = order.iter().map(|&i| self.nodes[i].id.clone()).collect();
        WeightMatrix { ids, matrix }
    }

    /// Out-degree and signed out-strength components for one node.
    pub fn degree_and_strength(&self, id: &str) -> Result<OutStrength> {
        let idx = self
            .node_index(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))?;
        Ok(self.degree_and_strength_at(idx))
    }

    pub fn degree_and_strength_at(&self, idx: usize) -> OutStrength {
        let mut k_out = 0;
        let mut s_pos = 0.0;
        let mut s_neg = 0.0;
        for edge in self.out_edges(idx) {
            k_out += 1;
            if edge.weight > 0.0 {
                s_pos += edge.weight;
            } else {
                s_neg += -edge.weight;
            }
        }
        OutStrength {
            k_out,
            s_out_signed: s_pos - s_neg,
            s_out_pos: s_pos,
            s_out_neg: s_neg,
        }
    }
}

/// Labeled dense weight matrix (row = source, column = target).
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    pub ids: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}
