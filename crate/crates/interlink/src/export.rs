//! Report-file serialization: GraphML and DOT network exports, the labeled
//! heat-map matrix, and the tabular CSV outputs.

use std::fmt::Write as _;

use crate::centrality::CentralityRecord;
use crate::classify::{ClassificationRecord, ClassificationSummary};
use crate::flowclust::ClusterReport;
use crate::graph::InterlinkNetwork;
use crate::numfmt::fmt_sig9;
use crate::prioritise::PrioritisedSet;

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn fmt_sdg(sdg: Option<u8>) -> String {
    sdg.map(|v| v.to_string()).unwrap_or_default()
}

/// GraphML with typed node (label, sdg, isolate) and edge (weight, p,
/// resolution) attributes.
pub fn graphml(g: &InterlinkNetwork) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"sdg\" for=\"node\" attr.name=\"sdg\" attr.type=\"int\"/>\n");
    out.push_str(
        "  <key id=\"isolate\" for=\"node\" attr.name=\"isolate\" attr.type=\"boolean\"/>\n",
    );
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"p\" for=\"edge\" attr.name=\"p\" attr.type=\"double\"/>\n");
    out.push_str(
        "  <key id=\"resolution\" for=\"edge\" attr.name=\"resolution\" attr.type=\"string\"/>\n",
    );
    out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");
    for idx in 0..g.node_count() {
        let node = g.node(idx);
        let _ = write!(out, "    <node id=\"{}\">", xml_escape(&node.id));
        if let Some(label) = &node.label {
            let _ = write!(out, "<data key=\"label\">{}</data>", xml_escape(label));
        }
        if let Some(sdg) = node.sdg {
            let _ = write!(out, "<data key=\"sdg\">{sdg}</data>");
        }
        let _ = write!(out, "<data key=\"isolate\">{}</data>", g.is_isolate(idx));
        out.push_str("</node>\n");
    }
    for edge in g.edges() {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data><data key=\"p\">{}</data><data key=\"resolution\">{}</data></edge>",
            xml_escape(&edge.source),
            xml_escape(&edge.target),
            fmt_sig9(edge.weight),
            fmt_sig9(edge.p),
            edge.resolution.as_str()
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// DOT digraph with the weight as the edge label.
pub fn dot(g: &InterlinkNetwork) -> String {
    let mut out = String::from("digraph interlink {\n");
    for idx in 0..g.node_count() {
        let node = g.node(idx);
        let mut attrs = Vec::new();
        if let Some(label) = &node.label {
            attrs.push(format!("label=\"{}\"", dot_escape(label)));
        }
        if let Some(sdg) = node.sdg {
            attrs.push(format!("sdg={sdg}"));
        }
        if g.is_isolate(idx) {
            attrs.push("isolate=true".to_string());
        }
        if attrs.is_empty() {
            let _ = writeln!(out, "  \"{}\";", dot_escape(&node.id));
        } else {
            let _ = writeln!(
                out,
                "  \"{}\" [{}];",
                dot_escape(&node.id),
                attrs.join(", ")
            );
        }
    }
    for edge in g.edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            dot_escape(&edge.source),
            dot_escape(&edge.target),
            fmt_sig9(edge.weight)
        );
    }
    out.push_str("}\n");
    out
}

/// Labeled dense weight matrix, rows = sources, columns = targets, in
/// SDG-then-id order.
pub fn heatmap_csv(g: &InterlinkNetwork) -> String {
    let wm = g.weight_matrix();
    let mut out = String::from("source");
    for id in &wm.ids {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for (row, id) in wm.ids.iter().enumerate() {
        out.push_str(id);
        for value in &wm.matrix[row] {
            out.push(',');
            out.push_str(&fmt_sig9(*value));
        }
        out.push('\n');
    }
    out
}

/// `source,target,weight,p,resolution` rows for the resolved network.
pub fn edges_csv(edges: &[crate::graph::Edge]) -> String {
    let mut out = String::from("source,target,weight,p,resolution\n");
    for e in edges {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.source,
            e.target,
            fmt_sig9(e.weight),
            fmt_sig9(e.p),
            e.resolution.as_str()
        );
    }
    out
}

/// `id,sdg,s_plus,s_minus,k_out,label` rows.
pub fn classification_csv(records: &[ClassificationRecord]) -> String {
    let mut out = String::from("id,sdg,s_plus,s_minus,k_out,label\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.id,
            fmt_sdg(r.sdg),
            fmt_sig9(r.s_plus),
            fmt_sig9(r.s_minus),
            r.k_out,
            r.label.as_str()
        );
    }
    out
}

/// Per-SDG label tallies, the polar-plot summary.
pub fn classification_by_sdg_csv(summary: &ClassificationSummary) -> String {
    let mut out = String::from("sdg,synergy_dominated,tradeoff_dominated,unclassified\n");
    for (sdg, tally) in &summary.by_sdg {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sdg(*sdg),
            tally.synergy,
            tally.tradeoff,
            tally.unclassified
        );
    }
    out
}

/// `rank,id,sdg,k_out,s_out,alpha,score` rows, rank starting at 1.
pub fn centrality_csv(ranking: &[CentralityRecord]) -> String {
    let mut out = String::from("rank,id,sdg,k_out,s_out,alpha,score\n");
    for (i, r) in ranking.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            i + 1,
            r.id,
            fmt_sdg(r.sdg),
            r.k_out,
            fmt_sig9(r.s_out),
            fmt_sig9(r.alpha),
            fmt_sig9(r.score)
        );
    }
    out
}

/// `module,size,id,label,opsahl_score` rows, multi-indicator clusters first.
pub fn clusters_csv(report: &ClusterReport) -> String {
    let mut out = String::from("module,size,id,label,opsahl_score\n");
    for info in report.all_clusters() {
        for member in &info.members {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                info.module,
                info.members.len(),
                member.id,
                member.label.as_str(),
                fmt_sig9(member.opsahl_score)
            );
        }
    }
    out
}

/// `category,module,id,sdg,opsahl_score` rows.
pub fn prioritised_csv(set: &PrioritisedSet) -> String {
    let mut out = String::from("category,module,id,sdg,opsahl_score\n");
    for pick in &set.picks {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            pick.category.as_str(),
            pick.module,
            pick.id,
            fmt_sdg(pick.sdg),
            fmt_sig9(pick.opsahl_score)
        );
    }
    out
}

/// `id,reason` rows for the filter drop report.
pub fn drops_csv(drops: &[crate::ingest::DropRecord]) -> String {
    let mut out = String::from("id,reason\n");
    for d in drops {
        let _ = writeln!(out, "{},{}", d.id, d.reason.as_str());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, NodeSpec, Resolution};

    fn sample_network() -> InterlinkNetwork {
        let nodes = vec![
            NodeSpec {
                id: "a".into(),
                label: Some("Access & <quality>".into()),
                sdg: Some(6),
            },
            NodeSpec::bare("b"),
            NodeSpec::bare("iso"),
        ];
        let edges = vec![Edge {
            source: "a".into(),
            target: "b".into(),
            weight: 0.625,
            p: 0.0125,
            resolution: Resolution::Dominant,
        }];
        InterlinkNetwork::build(nodes, edges).unwrap()
    }

    #[test]
    fn graphml_escapes_and_flags_isolates() {
        let g = sample_network();
        let xml = graphml(&g);
        assert!(xml.contains("Access &amp; &lt;quality&gt;"));
        assert!(xml.contains("<data key=\"isolate\">true</data>"));
        assert!(xml.contains("<data key=\"weight\">0.625</data>"));
        assert!(xml.contains("attr.type=\"double\""));
    }

    #[test]
    fn dot_uses_weight_as_edge_label() {
        let g = sample_network();
        let text = dot(&g);
        assert!(text.contains("\"a\" -> \"b\" [label=\"0.625\"]"));
        assert!(text.contains("isolate=true"));
    }

    #[test]
    fn tabular_layouts_are_pinned() {
        use crate::centrality::CentralityRecord;
        use crate::classify::{ClassLabel, ClassificationRecord};
        use crate::prioritise::{Pick, PickCategory, PrioritisedSet};

        let classes = vec![ClassificationRecord {
            id: "a".into(),
            sdg: Some(3),
            s_plus: 2.0 / 3.0,
            s_minus: 1.0 / 3.0,
            k_out: 3,
            label: ClassLabel::SynergyDominated,
        }];
        assert_eq!(
            classification_csv(&classes),
            "id,sdg,s_plus,s_minus,k_out,label\na,3,0.666666667,0.333333333,3,synergy-dominated\n"
        );

        let ranking = vec![CentralityRecord {
            id: "a".into(),
            sdg: Some(3),
            k_out: 3,
            s_out: 1.2,
            alpha: 0.5,
            score: 1.8973665961010275,
        }];
        assert_eq!(
            centrality_csv(&ranking),
            "rank,id,sdg,k_out,s_out,alpha,score\n1,a,3,3,1.2,0.5,1.8973666\n"
        );

        let set = PrioritisedSet {
            picks: vec![Pick {
                category: PickCategory::Cluster,
                module: 0,
                id: "a".into(),
                sdg: None,
                opsahl_score: 2.5,
                rationale: String::new(),
            }],
            skipped_clusters: vec![],
        };
        assert_eq!(
            prioritised_csv(&set),
            "category,module,id,sdg,opsahl_score\ncluster,0,a,,2.5\n"
        );

        let drops = vec![crate::ingest::DropRecord {
            id: "z".into(),
            reason: crate::ingest::DropReason::Missing,
        }];
        assert_eq!(drops_csv(&drops), "id,reason\nz,missing\n");
    }

    #[test]
    fn heatmap_round_trips_edge_set() {
        let g = sample_network();
        let csv = heatmap_csv(&g);
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').skip(1).collect();
        let mut rebuilt = Vec::new();
        for line in lines {
            let mut cells = line.split(',');
            let source = cells.next().unwrap();
            for (target, cell) in header.iter().zip(cells) {
                let w: f64 = cell.parse().unwrap();
                if w != 0.0 {
                    rebuilt.push((source.to_string(), target.to_string(), w));
                }
            }
        }
        assert_eq!(rebuilt, vec![("a".to_string(), "b".to_string(), 0.625)]);
    }
}
