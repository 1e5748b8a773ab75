//! Build the cluster-diversified prioritised indicator set end to end on a
//! compact hand-made system.
//!
//! ```bash
//! cargo run -p interlink --example prioritise_set
//! ```

use interlink::centrality::{opsahl_all, rank_synergistic};
use interlink::classify::classify_all;
use interlink::flowclust::{cluster_report, search, stationary_flows};
use interlink::graph::{Edge, InterlinkNetwork, NodeSpec, Resolution};
use interlink::prioritise::{prioritise, redundancy_report};

fn edge(source: &str, target: &str, weight: f64) -> Edge {
    Edge {
        source: source.to_string(),
        target: target.to_string(),
        weight,
        p: 0.001,
        resolution: Resolution::Unopposed,
    }
}

fn main() -> interlink::Result<()> {
    // health cycle (strong), knowledge cycle (strong), a trade-off pair, and
    // an isolated synergy-dominated indicator
    let ids = [
        "vacc",
        "mort",
        "matern",
        "pubs",
        "patents",
        "broadband",
        "emit",
        "hydro",
        "nutri",
    ];
    let nodes: Vec<NodeSpec> = ids
        .iter()
        .enumerate()
        .map(|(k, id)| NodeSpec {
            id: id.to_string(),
            label: None,
            sdg: Some((k % 17) as u8 + 1),
        })
        .collect();
    let edges = vec![
        edge("vacc", "mort", 0.96),
        edge("mort", "matern", 0.94),
        edge("matern", "vacc", 0.95),
        edge("vacc", "nutri", 0.5),
        edge("pubs", "patents", 0.93),
        edge("patents", "broadband", 0.91),
        edge("broadband", "pubs", 0.92),
        edge("emit", "hydro", 0.95),
        edge("hydro", "emit", -0.9),
        edge("emit", "vacc", -0.4),
        edge("nutri", "mort", 0.6),
    ];
    let network = InterlinkNetwork::build(nodes, edges)?;

    let (classes, _) = classify_all(&network);
    let g_plus = network.positive_subnetwork();
    let ranking = rank_synergistic(&g_plus, &classes, 0.5)?;
    let scores_all = opsahl_all(&g_plus, 0.5)?;

    let g_strong = g_plus.strong_subnetwork(0.9)?;
    let fg = stationary_flows(&g_strong, 0.15)?;
    let partition = search(&fg, 42, 10)?;
    let clusters = cluster_report(&partition, &classes, &scores_all)?;
    println!(
        "{} multi-indicator and {} single-indicator clusters",
        clusters.multi.len(),
        clusters.single.len()
    );
    for info in &clusters.multi {
        let members: Vec<&str> = info.members.iter().map(|m| m.id.as_str()).collect();
        println!(
            "  cluster {}: {:?}{}",
            info.module,
            members,
            if info.has_synergy_member {
                ""
            } else {
                "  (no synergy-dominated member)"
            }
        );
    }

    let set = prioritise(&partition, &classes, &ranking)?;
    println!("\nprioritised set ({} picks):", set.picks.len());
    for pick in &set.picks {
        println!(
            "  [{}] module {} -> {} (score {:.3}): {}",
            pick.category.as_str(),
            pick.module,
            pick.id,
            pick.opsahl_score,
            pick.rationale
        );
    }
    if !set.skipped_clusters.is_empty() {
        println!(
            "clusters without a synergy-dominated member: {:?}",
            set.skipped_clusters
        );
    }

    if !ranking.is_empty() {
        let top_n = ranking.len().min(3);
        let redundancy = redundancy_report(&ranking, &partition, top_n)?;
        println!(
            "\ntop {} ranked indicators concentrate {:.0}% in one cluster",
            redundancy.top_n,
            redundancy.concentration * 100.0
        );
    }
    Ok(())
}
