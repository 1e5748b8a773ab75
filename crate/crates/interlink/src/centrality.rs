//! Opsahl weighted out-degree centrality on the positive network.

use crate::classify::{ClassLabel, ClassificationRecord};
use crate::error::{Error, Result};
use crate::graph::InterlinkNetwork;

/// One node's Opsahl out-centrality on G+.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityRecord {
    pub id: String,
    pub sdg: Option<u8>,
    pub k_out: usize,
    pub s_out: f64,
    pub alpha: f64,
    pub score: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Parameter {
            name: "opsahl-alpha",
            value: alpha,
            expected: "a tuning value in [0, 1]",
        });
    }
    Ok(())
}

fn opsahl_score(k_out: usize, s_out: f64, alpha: f64) -> f64 {
    if k_out == 0 {
        return 0.0;
    }
    let k = k_out as f64;
    // The alpha endpoints and midpoint reduce algebraically; evaluating the
    // reduced forms keeps those contracts exact.
    if alpha == 0.0 {
        k
    } else if alpha == 1.0 {
        s_out
    } else if alpha == 0.5 {
        (k * s_out).sqrt()
    } else {
        k.powf(1.0 - alpha) * s_out.powf(alpha)
    }
}

/// Opsahl out-centrality k^(1-alpha) * s^alpha for one node of a positive
/// network. A node without outgoing edges scores 0 for every alpha.
pub fn opsahl_out(g_plus: &InterlinkNetwork, id: &str, alpha: f64) -> Result<CentralityRecord> {
    check_alpha(alpha)?;
    let idx = g_plus
        .node_index(id)
        .ok_or_else(|| Error::UnknownNode(id.to_string()))?;
    if let Some(e) = g_plus.out_edges(idx).find(|e| e.weight <= 0.0) {
        return Err(Error::Contract(format!(
            "opsahl_out expects a positive network, found {} -> {} with weight {}",
            e.source, e.target, e.weight
        )));
    }
    let strength = g_plus.degree_and_strength_at(idx);
    let node = g_plus.node(idx);
    Ok(CentralityRecord {
        id: node.id.clone(),
        sdg: node.sdg,
        k_out: strength.k_out,
        s_out: strength.s_out_pos,
        alpha,
        score: opsahl_score(strength.k_out, strength.s_out_pos, alpha),
    })
}

/// Centrality records for every node of G+, in node order.
pub fn opsahl_all(g_plus: &InterlinkNetwork, alpha: f64) -> Result<Vec<CentralityRecord>> {
    check_alpha(alpha)?;
    if let Some(e) = g_plus.edges().iter().find(|e| e.weight <= 0.0) {
        return Err(Error::Contract(format!(
            "opsahl centrality expects a positive network, found {} -> {} with weight {}",
            e.source, e.target, e.weight
        )));
    }
    (0..g_plus.node_count())
        .map(|idx| opsahl_out(g_plus, &g_plus.node(idx).id.clone(), alpha))
        .collect()
}

/// Rank synergy-dominated indicators by Opsahl out-centrality on G+.
///
/// Classification comes from the full signed network; centrality from G+.
/// Sorted by score descending, ties broken by id ascending.
pub fn rank_synergistic(
    g_plus: &InterlinkNetwork,
    classes: &[ClassificationRecord],
    alpha: f64,
) -> Result<Vec<CentralityRecord>> {
    check_alpha(alpha)?;
    let mut records = Vec::new();
    for class in classes {
        if class.label != ClassLabel::SynergyDominated {
            continue;
        }
        records.push(opsahl_out(g_plus, &class.id, alpha)?);
    }
    records.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores are finite")
            .then_with(|| a.id.cmp(&b.id))
    });
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, NodeSpec, Resolution};
    use approx::assert_abs_diff_eq;

    fn positive_network(out_weights: &[f64]) -> InterlinkNetwork {
        let mut nodes = vec![NodeSpec::bare("i")];
        let mut edges = Vec::new();
        for (k, &w) in out_weights.iter().enumerate() {
            let id = format!("t{k}");
            nodes.push(NodeSpec::bare(id.clone()));
            edges.push(Edge {
                source: "i".to_string(),
                target: id,
                weight: w,
                p: 0.01,
                resolution: Resolution::Unopposed,
            });
        }
        InterlinkNetwork::build(nodes, edges).unwrap()
    }

    #[test]
    fn alpha_endpoints_reduce_exactly() {
        let g = positive_network(&[0.5, 0.3, 0.4]);
        let k_only = opsahl_out(&g, "i", 0.0).unwrap();
        assert_eq!(k_only.score, 3.0);
        let s_only = opsahl_out(&g, "i", 1.0).unwrap();
        assert_eq!(s_only.score, s_only.s_out);
    }

    #[test]
    fn midpoint_is_sqrt_ks() {
        let g = positive_network(&[0.5, 0.3, 0.4]);
        let rec = opsahl_out(&g, "i", 0.5).unwrap();
        assert_abs_diff_eq!(rec.score, (3.0_f64 * 1.2).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(rec.score, 1.8973665961010275, epsilon = 1e-12);
        assert_abs_diff_eq!(rec.score * rec.score, 3.0 * rec.s_out, epsilon = 1e-12);
    }

    #[test]
    fn zero_out_degree_scores_zero() {
        let g = positive_network(&[0.5]);
        for alpha in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(opsahl_out(&g, "t0", alpha).unwrap().score, 0.0);
        }
    }

    #[test]
    fn invalid_alpha_and_negative_edges_rejected() {
        let g = positive_network(&[0.5]);
        assert!(matches!(
            opsahl_out(&g, "i", -0.1),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            opsahl_out(&g, "i", 1.1),
            Err(Error::Parameter { .. })
        ));

        let signed = positive_network(&[0.5]);
        let mut nodes: Vec<NodeSpec> = signed.nodes().to_vec();
        nodes.push(NodeSpec::bare("neg"));
        let mut edges: Vec<Edge> = signed.edges().to_vec();
        edges.push(Edge {
            source: "i".to_string(),
            target: "neg".to_string(),
            weight: -0.4,
            p: 0.01,
            resolution: Resolution::Unopposed,
        });
        let bad = InterlinkNetwork::build(nodes, edges).unwrap();
        assert!(matches!(
            opsahl_out(&bad, "i", 0.5),
            Err(Error::Contract(_))
        ));
        assert!(matches!(opsahl_all(&bad, 0.5), Err(Error::Contract(_))));
    }

    #[test]
    fn ranking_restricts_to_synergy_dominated_and_breaks_ties_by_id() {
        use crate::classify::classify_all;
        let nodes = vec![
            NodeSpec::bare("a"),
            NodeSpec::bare("b"),
            NodeSpec::bare("c"),
            NodeSpec::bare("d"),
        ];
        let mk = |s: &str, t: &str, w: f64| Edge {
            source: s.into(),
            target: t.into(),
            weight: w,
            p: 0.01,
            resolution: Resolution::Unopposed,
        };
        // a and b have identical positive profiles; c is trade-off dominated
        let full = InterlinkNetwork::build(
            nodes.clone(),
            vec![
                mk("a", "c", 0.6),
                mk("b", "d", 0.6),
                mk("c", "d", -0.9),
                mk("d", "a", 0.2),
            ],
        )
        .unwrap();
        let (classes, _) = classify_all(&full);
        let g_plus = full.positive_subnetwork();
        let ranking = rank_synergistic(&g_plus, &classes, 0.5).unwrap();
        let ids: Vec<&str> = ranking.iter().map(|r| r.id.as_str()).collect();
        // c is trade-off dominated and excluded; a/b tie resolved by id
        assert_eq!(ids, vec!["a", "b", "d"]);
        assert!(ranking[0].score >= ranking[2].score);
    }

    #[test]
    fn empty_ranking_without_synergy_nodes() {
        use crate::classify::classify_all;
        let g = positive_network(&[0.5]);
        // overwrite with an all-negative network
        let full = InterlinkNetwork::build(
            g.nodes().to_vec(),
            vec![Edge {
                source: "i".into(),
                target: "t0".into(),
                weight: -0.8,
                p: 0.01,
                resolution: Resolution::Unopposed,
            }],
        )
        .unwrap();
        let (classes, _) = classify_all(&full);
        let ranking = rank_synergistic(&full.positive_subnetwork(), &classes, 0.5).unwrap();
        assert!(ranking.is_empty());
    }
}
