//! Classify indicators as synergy- or trade-off-dominated from the balance
//! of their outgoing spillovers.
//!
//! ```bash
//! cargo run -p interlink --example classify_indicators
//! ```

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
    // `i` pushes one strong synergy against two mild trade-offs; `j` spreads
    // moderate synergies wide; `water` mirrors an infrastructure indicator
    // whose expansion precedes deteriorating outcomes elsewhere.
    let nodes = vec![
        NodeSpec::bare("i"),
        NodeSpec::bare("j"),
        NodeSpec::bare("water"),
        NodeSpec::bare("x1"),
        NodeSpec::bare("x2"),
        NodeSpec::bare("x3"),
        NodeSpec::bare("x4"),
    ];
    let edges = vec![
        edge("i", "x1", -0.2),
        edge("i", "x2", -0.2),
        edge("i", "x3", 0.8),
        edge("j", "x1", 0.3),
        edge("j", "x2", 0.4),
        edge("j", "x3", 0.5),
        edge("j", "x4", -0.7),
        edge("water", "x1", -0.9),
        edge("water", "x2", -0.9),
        edge("water", "x3", -0.6),
        edge("water", "x4", 0.4),
    ];
    let network = InterlinkNetwork::build(nodes, edges)?;
    let (records, summary) = classify_all(&network);

    println!(
        "{:<8} {:>7} {:>7} {:>6}  label",
        "id", "s_plus", "s_minus", "k_out"
    );
    for rec in &records {
        println!(
            "{:<8} {:>7.3} {:>7.3} {:>6}  {}",
            rec.id,
            rec.s_plus,
            rec.s_minus,
            rec.k_out,
            rec.label.as_str()
        );
    }
    println!(
        "\ntotals: {} synergy-dominated, {} trade-off-dominated, {} without outflow",
        summary.synergy, summary.tradeoff, summary.unclassified
    );
    Ok(())
}
