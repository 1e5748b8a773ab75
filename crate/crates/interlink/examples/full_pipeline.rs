//! Run the whole pipeline on a generated panel and walk through the
//! manifest: the library-level equivalent of `interlink run`.
//!
//! ```bash
//! cargo run -p interlink --example full_pipeline
//! ```

use interlink::pipeline::{run_pipeline, RunConfig};
use interlink::synth::{write_synthetic, SynthSpec};

fn main() -> interlink::Result<()> {
    let work_dir = std::env::temp_dir().join("interlink-full-pipeline");
    let panel_path = work_dir.join("panel.csv");
    let spec = SynthSpec::two_groups_of_four();
    write_synthetic(&spec, 42, &panel_path)?;

    let config = RunConfig::new(&panel_path, work_dir.join("results"), spec.window);
    let (manifest, artifacts) = run_pipeline(&config)?;

    let c = &manifest.counts;
    println!("input sha256: {}", &manifest.input_sha256[..16]);
    println!(
        "panel: {} series loaded, {} retained, {} dropped",
        c.series_loaded, c.series_retained, c.series_dropped
    );
    println!(
        "network: {} nodes, {} edges ({} positive / {} negative), {} strong",
        c.nodes, c.edges, c.positive_edges, c.negative_edges, c.strong_edges
    );
    println!(
        "classes: {} synergy / {} trade-off / {} unclassified",
        c.synergy_dominated, c.tradeoff_dominated, c.unclassified
    );
    println!(
        "clusters: {} multi + {} single at {:.4} bits",
        c.multi_indicator_clusters, c.single_indicator_clusters, manifest.codelength
    );
    println!("picks: {}", c.picks);
    for pick in &artifacts.prioritised.picks {
        println!("  [{}] {}", pick.category.as_str(), pick.id);
    }
    println!("\nreports in {}", config.out_dir.display());
    for (stage, ms) in &manifest.timings_ms {
        println!("  {stage}: {ms} ms");
    }
    Ok(())
}
