//! Generate a planted-structure synthetic panel and its ground truth.
//!
//! ```bash
//! cargo run -p interlink --example synthetic_panel
//! ```

use interlink::synth::{write_synthetic, SynthSpec};

fn main() -> interlink::Result<()> {
    let spec = SynthSpec::two_groups_of_four();
    let out_dir = std::env::temp_dir().join("interlink-synthetic-panel");
    let panel_path = out_dir.join("panel.csv");
    let truth_path = write_synthetic(&spec, 42, &panel_path)?;

    println!("panel:  {}", panel_path.display());
    println!("truth:  {}", truth_path.display());
    println!();
    println!(
        "{} groups over {}..{}, amplitude {}, noise {}",
        spec.groups.len(),
        spec.window.start,
        spec.window.end,
        spec.amplitude,
        spec.noise
    );
    for group in &spec.groups {
        println!(
            "  group `{}`: {} member(s), {} inverted, shape {:?}",
            group.prefix, group.members, group.inverted_members, group.shape
        );
    }
    let preview = std::fs::read_to_string(&panel_path).expect("panel was just written");
    println!("\nfirst rows:");
    for line in preview.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
