//! Rank synergy-dominated indicators by Opsahl out-centrality on the
//! positive subnetwork.
//!
//! ```bash
//! cargo run -p interlink --example rank_centrality
//! ```

use interlink::centrality::{opsahl_out, rank_synergistic};
use interlink::classify::classify_all;
use interlink::graph::{Edge, InterlinkNetwork, NodeSpec, Resolution};

fn edge(source: &str, target: &str, weight: f64) -> Edge {
    Edge {
        source: source.to_string(),
        target: target.to_string(),
        weight,
        p: 0.01,
        resolution: Resolution::Unopposed,
    }
}

fn main() -> interlink::Result<()> {
    let nodes: Vec<NodeSpec> = ["hub", "broad", "narrow", "t1", "t2", "t3", "t4"]
        .iter()
        .map(|id| NodeSpec::bare(*id))
        .collect();
    let edges = vec![
        // broad reaches four indicators with moderate strength
        edge("broad", "t1", 0.5),
        edge("broad", "t2", 0.5),
        edge("broad", "t3", 0.5),
        edge("broad", "t4", 0.5),
        // narrow reaches one indicator strongly
        edge("narrow", "t1", 0.95),
        // hub mixes reach and strength but carries one trade-off
        edge("hub", "t1", 0.9),
        edge("hub", "t2", 0.8),
        edge("hub", "t3", -0.3),
    ];
    let network = InterlinkNetwork::build(nodes, edges)?;
    let (classes, _) = classify_all(&network);
    let g_plus = network.positive_subnetwork();

    for alpha in [0.0, 0.5, 1.0] {
        let rec = opsahl_out(&g_plus, "hub", alpha)?;
        println!(
            "hub at alpha = {:.1}: k_out = {}, s_out = {:.2}, score = {:.4}",
            alpha, rec.k_out, rec.s_out, rec.score
        );
    }

    println!("\nranking (alpha = 0.5, synergy-dominated only):");
    let ranking = rank_synergistic(&g_plus, &classes, 0.5)?;
    for (rank, rec) in ranking.iter().enumerate() {
        println!(
            "  {}. {:<8} score = {:.4}  (k = {}, s = {:.2})",
            rank + 1,
            rec.id,
            rec.score,
            rec.k_out,
            rec.s_out
        );
    }
    Ok(())
}
