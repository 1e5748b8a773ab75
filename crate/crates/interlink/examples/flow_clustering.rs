//! Map-equation flow clustering of a strong-synergy network: stationary
//! flows, codelength evaluation, and the seeded greedy search.
//!
//! ```bash
//! cargo run -p interlink --example flow_clustering
//! ```

use interlink::flowclust::{map_equation, search, stationary_flows};
use interlink::graph::{Edge, InterlinkNetwork, NodeSpec, Resolution};

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
    // two directed 3-cycles with a weak bridge, plus an isolate
    let ids = ["p1", "p2", "p3", "e1", "e2", "e3", "lone"];
    let nodes: Vec<NodeSpec> = ids.iter().map(|id| NodeSpec::bare(*id)).collect();
    let edges = vec![
        edge("p1", "p2", 0.95),
        edge("p2", "p3", 0.93),
        edge("p3", "p1", 0.97),
        edge("e1", "e2", 0.96),
        edge("e2", "e3", 0.92),
        edge("e3", "e1", 0.94),
        edge("p1", "e1", 0.1),
        edge("e1", "p1", 0.1),
    ];
    let network = InterlinkNetwork::build(nodes, edges)?;

    let fg = stationary_flows(&network, 0.15)?;
    println!("stationary visit rates (teleport 0.15):");
    for (id, rate) in fg.ids().iter().zip(fg.visit_rates()) {
        println!("  {id:<5} {rate:.5}");
    }
    println!(
        "residual {:.2e} after {} iterations\n",
        fg.residual(),
        fg.iterations()
    );

    let n = network.node_count();
    let one_module = map_equation(&fg, &vec![0; n])?;
    let singletons = map_equation(&fg, &(0..n).collect::<Vec<_>>())?;
    println!("codelength, everything in one module: {one_module:.4} bits");
    println!("codelength, every node alone:         {singletons:.4} bits");

    let partition = search(&fg, 42, 10)?;
    println!(
        "search found {} modules at {:.4} bits (trial {} of {})",
        partition.num_modules(),
        partition.codelength,
        partition.winning_trial,
        partition.num_trials
    );
    for (module, members) in partition.modules().iter().enumerate() {
        let names: Vec<&str> = members.iter().map(|&i| partition.ids[i].as_str()).collect();
        let flow = &partition.module_flows[module];
        println!(
            "  module {module}: {:?} (visit {:.4}, exit {:.4})",
            names, flow.visit_rate, flow.exit_rate
        );
    }
    Ok(())
}
