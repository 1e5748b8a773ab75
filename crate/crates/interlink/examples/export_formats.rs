//! Serialize a network as GraphML, DOT, and the heat-map CSV matrix.
//!
//! ```bash
//! cargo run -p interlink --example export_formats
//! ```

use interlink::export::{dot, graphml, heatmap_csv};
use interlink::graph::{Edge, InterlinkNetwork, NodeSpec, Resolution};

fn main() -> interlink::Result<()> {
    let nodes = vec![
        NodeSpec {
            id: "poverty".into(),
            label: Some("Poverty headcount ratio".into()),
            sdg: Some(1),
        },
        NodeSpec {
            id: "mort5".into(),
            label: Some("Mortality rate, under-5".into()),
            sdg: Some(3),
        },
        NodeSpec {
            id: "electr".into(),
            label: Some("Access to electricity".into()),
            sdg: Some(7),
        },
        NodeSpec::bare("unmapped"),
    ];
    let edges = vec![
        Edge {
            source: "poverty".into(),
            target: "mort5".into(),
            weight: 0.91,
            p: 0.0004,
            resolution: Resolution::Dominant,
        },
        Edge {
            source: "electr".into(),
            target: "poverty".into(),
            weight: -0.44,
            p: 0.031,
            resolution: Resolution::Unopposed,
        },
    ];
    let network = InterlinkNetwork::build(nodes, edges)?;

    println!("--- network.graphml ---");
    print!("{}", graphml(&network));
    println!("--- network.dot ---");
    print!("{}", dot(&network));
    println!("--- heatmap.csv (rows: sources, SDG-then-id order) ---");
    print!("{}", heatmap_csv(&network));
    Ok(())
}
