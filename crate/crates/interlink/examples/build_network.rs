//! Estimate a directed interlinkage network from a small panel.
//!
//! ```bash
//! cargo run -p interlink --example build_network
//! ```

use interlink::ingest::{filter_panel, parse_panel, Window};
use interlink::netbuild::{
    all_pairs, build_network, dominance_resolve, panel_nodes, CorrelationMethod,
};

fn main() -> interlink::Result<()> {
    // B tracks A with a one-year delay; C moves against A; D is noise-ish.
    let csv = "\
year,A,B,C,D
2000,10,12,90,55
2001,20,11,82,54
2002,30,21,73,58
2003,40,32,61,52
2004,50,41,52,57
2005,60,52,40,51
2006,70,61,33,56
2007,80,71,22,53
2008,90,82,10,59
2009,95,91,5,50
";
    let window = Window::new(2000, 2009)?;
    let raw = parse_panel(csv, window)?;
    let (panel, dropped) = filter_panel(&raw)?;
    println!(
        "retained {} series, dropped {}",
        panel.series.len(),
        dropped.len()
    );

    let (significant, skipped) = all_pairs(&panel, 1, 0.05, CorrelationMethod::Pearson)?;
    println!(
        "significant ordered pairs at p < 0.05: {}",
        significant.len()
    );
    for est in &significant {
        println!(
            "  {} -> {}  r = {:+.3}  (n = {}, p = {:.4})",
            est.source, est.target, est.r, est.n, est.p
        );
    }
    if !skipped.is_empty() {
        println!("skipped {} degenerate pair(s)", skipped.len());
    }

    let edges = dominance_resolve(significant);
    let network = build_network(panel_nodes(&panel), edges)?;
    println!(
        "resolved network: {} nodes, {} edges ({} positive / {} negative)",
        network.node_count(),
        network.edge_count(),
        network.positive_edge_count(),
        network.negative_edge_count()
    );
    for edge in network.edges() {
        println!(
            "  {} -> {}  w = {:+.3}  [{}]",
            edge.source,
            edge.target,
            edge.weight,
            edge.resolution.as_str()
        );
    }
    Ok(())
}
