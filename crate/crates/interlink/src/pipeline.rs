//! End-to-end pipeline: ingest -> netbuild -> classify -> centrality ->
//! strong subnetwork -> flow clustering -> prioritisation, with all report
//! files written to the output directory.
//!
//! Files are written with a `.partial` suffix as stages complete and renamed
//! to their final names only after the whole run succeeds, so a failed run
//! leaves its partial outputs behind for inspection.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::centrality::{self, CentralityRecord};
use crate::classify::{self, ClassificationRecord, ClassificationSummary};
use crate::error::{Error, Result};
use crate::export;
use crate::flowclust::{self, ClusterReport, Partition};
use crate::graph::InterlinkNetwork;
use crate::ingest::{self, DropRecord, RangeViolation, Window};
use crate::netbuild::{self, CorrelationMethod};
use crate::prioritise::{self, PrioritisedSet, RedundancyReport};

/// Resolved configuration for one pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub meta: Option<PathBuf>,
    pub window: Window,
    pub lag: usize,
    pub sig: f64,
    pub method: CorrelationMethod,
    pub fdr: bool,
    pub strong_threshold: f64,
    pub opsahl_alpha: f64,
    pub teleport: f64,
    pub trials: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub strict: bool,
    pub threads: Option<usize>,
    pub top_n: usize,
}

impl RunConfig {
    /// Defaults mirroring the CLI flag defaults; input/out must be set.
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>, window: Window) -> Self {
        RunConfig {
            input: input.into(),
            meta: None,
            window,
            lag: 1,
            sig: 0.05,
            method: CorrelationMethod::Pearson,
            fdr: false,
            strong_threshold: 0.9,
            opsahl_alpha: 0.5,
            teleport: 0.15,
            trials: 10,
            seed: 42,
            out_dir: out_dir.into(),
            strict: false,
            threads: None,
            top_n: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lag == 0 {
            return Err(Error::Parameter {
                name: "lag",
                value: 0.0,
                expected: "a positive integer",
            });
        }
        if !(self.sig > 0.0 && self.sig <= 1.0) {
            return Err(Error::Parameter {
                name: "sig",
                value: self.sig,
                expected: "a significance level in (0, 1]",
            });
        }
        if !(self.strong_threshold > 0.0 && self.strong_threshold <= 1.0) {
            return Err(Error::Parameter {
                name: "strong-threshold",
                value: self.strong_threshold,
                expected: "a value in (0, 1]",
            });
        }
        if !(0.0..=1.0).contains(&self.opsahl_alpha) {
            return Err(Error::Parameter {
                name: "opsahl-alpha",
                value: self.opsahl_alpha,
                expected: "a tuning value in [0, 1]",
            });
        }
        if !(self.teleport > 0.0 && self.teleport < 1.0) {
            return Err(Error::Parameter {
                name: "teleport",
                value: self.teleport,
                expected: "a rate strictly between 0 and 1",
            });
        }
        if self.trials == 0 {
            return Err(Error::Parameter {
                name: "trials",
                value: 0.0,
                expected: "at least 1",
            });
        }
        Ok(())
    }
}

/// Per-stage counters echoed into the manifest.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ManifestCounts {
    pub series_loaded: usize,
    pub series_retained: usize,
    pub series_dropped: usize,
    pub range_violations: usize,
    pub candidate_pairs: usize,
    pub significant_estimates: usize,
    pub degenerate_pairs_skipped: usize,
    pub nodes: usize,
    pub edges: usize,
    pub positive_edges: usize,
    pub negative_edges: usize,
    pub synergy_dominated: usize,
    pub tradeoff_dominated: usize,
    pub unclassified: usize,
    pub strong_edges: usize,
    pub clusters_total: usize,
    pub multi_indicator_clusters: usize,
    pub single_indicator_clusters: usize,
    pub picks: usize,
    pub skipped_clusters: usize,
}

impl ManifestCounts {
    /// Internal consistency: edge signs and class labels must tile their
    /// totals.
    pub fn validate(&self) -> Result<()> {
        if self.positive_edges + self.negative_edges != self.edges {
            return Err(Error::Contract(format!(
                "edge sign split {} + {} does not tile {} edges",
                self.positive_edges, self.negative_edges, self.edges
            )));
        }
        if self.synergy_dominated + self.tradeoff_dominated + self.unclassified != self.nodes {
            return Err(Error::Contract(format!(
                "class split {} + {} + {} does not tile {} nodes",
                self.synergy_dominated, self.tradeoff_dominated, self.unclassified, self.nodes
            )));
        }
        Ok(())
    }
}

/// Run provenance: resolved config, input fingerprint, stage counts,
/// codelength, and wall-clock timings.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: RunConfig,
    pub input_sha256: String,
    pub counts: ManifestCounts,
    pub codelength: f64,
    pub timings_ms: BTreeMap<String, u64>,
}

/// In-memory results of a pipeline run, for library callers.
#[derive(Debug)]
pub struct PipelineArtifacts {
    pub drop_report: Vec<DropRecord>,
    pub range_violations: Vec<RangeViolation>,
    pub network: InterlinkNetwork,
    pub classes: Vec<ClassificationRecord>,
    pub class_summary: ClassificationSummary,
    pub ranking: Vec<CentralityRecord>,
    pub partition: Partition,
    pub clusters: ClusterReport,
    pub prioritised: PrioritisedSet,
    pub redundancy: Option<RedundancyReport>,
}

struct Emitter {
    dir: PathBuf,
    pending: Vec<(PathBuf, PathBuf)>,
}

impl Emitter {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            pending: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, content: &str) -> Result<()> {
        let partial = self.dir.join(format!("{name}.partial"));
        fs::write(&partial, content).map_err(|source| Error::Io {
            path: partial.clone(),
            source,
        })?;
        self.pending.push((partial, self.dir.join(name)));
        Ok(())
    }

    fn finalize(self) -> Result<()> {
        for (partial, final_path) in self.pending {
            fs::rename(&partial, &final_path).map_err(|source| Error::Io {
                path: final_path,
                source,
            })?;
        }
        Ok(())
    }
}

fn resolve_threads(config: &RunConfig) -> usize {
    config
        .threads
        .or_else(|| {
            std::env::var("INTERLINK_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .filter(|&n| n > 0)
        .unwrap_or(1)
}

/// Execute the full pipeline and write every report file.
///
/// Returns the manifest plus the in-memory artifacts. Stage parallelism is
/// capped by `threads` (flag, then `INTERLINK_THREADS`, then sequential).
pub fn run_pipeline(config: &RunConfig) -> Result<(RunManifest, PipelineArtifacts)> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_threads(config))
        .build()
        .map_err(|e| Error::Contract(format!("thread pool: {e}")))?;
    pool.install(|| run_stages(config))
}

fn run_stages(config: &RunConfig) -> Result<(RunManifest, PipelineArtifacts)> {
    let mut emitter = Emitter::new(&config.out_dir)?;
    let mut counts = ManifestCounts::default();
    let mut timings: BTreeMap<String, u64> = BTreeMap::new();
    let mut stage_clock = Instant::now();
    let lap = |name: &str, timings: &mut BTreeMap<String, u64>, clock: &mut Instant| {
        timings.insert(name.to_string(), clock.elapsed().as_millis() as u64);
        *clock = Instant::now();
    };

    // ingest
    let input_bytes = fs::read(&config.input).map_err(|source| Error::Io {
        path: config.input.clone(),
        source,
    })?;
    let input_sha256 = format!("{:x}", Sha256::digest(&input_bytes));
    let raw = ingest::parse_panel(
        std::str::from_utf8(&input_bytes).map_err(|e| Error::Load {
            location: config.input.display().to_string(),
            message: format!("input is not UTF-8: {e}"),
        })?,
        config.window,
    )?;
    counts.series_loaded = raw.series.len();
    let (mut panel, drop_report) = ingest::filter_panel(&raw)?;
    counts.series_retained = panel.series.len();
    counts.series_dropped = drop_report.len();
    emitter.write("drops.csv", &export::drops_csv(&drop_report))?;
    if let Some(meta_path) = &config.meta {
        let meta = ingest::load_metadata(meta_path)?;
        ingest::apply_metadata(&mut panel, &meta);
    }
    let range_violations = ingest::validate_range(&panel);
    counts.range_violations = range_violations.len();
    if config.strict {
        ingest::enforce_range(&panel)?;
    }
    lap("ingest", &mut timings, &mut stage_clock);

    // netbuild
    let (all_estimates, skipped) = netbuild::estimate_all_pairs(&panel, config.lag, config.method)?;
    counts.candidate_pairs = all_estimates.len() + skipped.len();
    counts.degenerate_pairs_skipped = skipped.len();
    let significant = if config.fdr {
        netbuild::benjamini_hochberg(&all_estimates, config.sig)?
    } else {
        all_estimates
            .into_iter()
            .filter(|e| e.p < config.sig)
            .collect()
    };
    counts.significant_estimates = significant.len();
    let edges = netbuild::dominance_resolve(significant);
    let network = netbuild::build_network(netbuild::panel_nodes(&panel), edges)?;
    counts.nodes = network.node_count();
    counts.edges = network.edge_count();
    counts.positive_edges = network.positive_edge_count();
    counts.negative_edges = network.negative_edge_count();
    emitter.write("edges.csv", &export::edges_csv(network.edges()))?;
    emitter.write("heatmap.csv", &export::heatmap_csv(&network))?;
    emitter.write("network.graphml", &export::graphml(&network))?;
    emitter.write("network.dot", &export::dot(&network))?;
    lap("netbuild", &mut timings, &mut stage_clock);

    // classify (on the full signed network)
    let (classes, class_summary) = classify::classify_all(&network);
    counts.synergy_dominated = class_summary.synergy;
    counts.tradeoff_dominated = class_summary.tradeoff;
    counts.unclassified = class_summary.unclassified;
    emitter.write("classification.csv", &export::classification_csv(&classes))?;
    emitter.write(
        "classification_by_sdg.csv",
        &export::classification_by_sdg_csv(&class_summary),
    )?;
    lap("classify", &mut timings, &mut stage_clock);

    // centrality (on G+)
    let g_plus = network.positive_subnetwork();
    let ranking = centrality::rank_synergistic(&g_plus, &classes, config.opsahl_alpha)?;
    let centrality_all = centrality::opsahl_all(&g_plus, config.opsahl_alpha)?;
    emitter.write("centrality.csv", &export::centrality_csv(&ranking))?;
    lap("centrality", &mut timings, &mut stage_clock);

    // strong subnetwork + flow clustering
    let g_strong = g_plus.strong_subnetwork(config.strong_threshold)?;
    counts.strong_edges = g_strong.edge_count();
    let flow_graph = flowclust::stationary_flows(&g_strong, config.teleport)?;
    let partition = flowclust::search(&flow_graph, config.seed, config.trials)?;
    let clusters = flowclust::cluster_report(&partition, &classes, &centrality_all)?;
    counts.clusters_total = partition.num_modules();
    counts.multi_indicator_clusters = clusters.multi.len();
    counts.single_indicator_clusters = clusters.single.len();
    emitter.write("clusters.csv", &export::clusters_csv(&clusters))?;
    let partition_doc = PartitionDoc::new(&partition, config.teleport);
    emitter.write(
        "partition.json",
        &serde_json::to_string_pretty(&partition_doc)?,
    )?;
    lap("flowclust", &mut timings, &mut stage_clock);

    // prioritise
    let prioritised = prioritise::prioritise(&partition, &classes, &ranking)?;
    counts.picks = prioritised.picks.len();
    counts.skipped_clusters = prioritised.skipped_clusters.len();
    emitter.write("prioritised.csv", &export::prioritised_csv(&prioritised))?;
    let redundancy = if ranking.is_empty() {
        None
    } else {
        let top_n = config.top_n.min(ranking.len());
        Some(prioritise::redundancy_report(&ranking, &partition, top_n)?)
    };
    lap("prioritise", &mut timings, &mut stage_clock);

    counts.validate()?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        input_sha256,
        counts,
        codelength: partition.codelength,
        timings_ms: timings,
    };
    emitter.write("manifest.json", &serde_json::to_string_pretty(&manifest)?)?;
    emitter.finalize()?;

    Ok((
        manifest,
        PipelineArtifacts {
            drop_report,
            range_violations,
            network,
            classes,
            class_summary,
            ranking,
            partition,
            clusters,
            prioritised,
            redundancy,
        },
    ))
}

/// Shape of `partition.json`.
#[derive(Debug, Serialize)]
struct PartitionDoc {
    codelength: f64,
    teleport: f64,
    trials: usize,
    winning_trial: usize,
    seed: u64,
    assignment: BTreeMap<String, usize>,
    module_flows: Vec<flowclust::ModuleFlow>,
}

impl PartitionDoc {
    fn new(partition: &Partition, teleport: f64) -> Self {
        let assignment = partition
            .ids
            .iter()
            .cloned()
            .zip(partition.assignment.iter().copied())
            .collect();
        PartitionDoc {
            codelength: partition.codelength,
            teleport,
            trials: partition.num_trials,
            winning_trial: partition.winning_trial,
            seed: partition.seed,
            assignment,
            module_flows: partition.module_flows.clone(),
        }
    }
}

/// Published reference counts for the India analysis, for side-by-side
/// comparison when a real SDR panel is supplied.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceCounts {
    pub nodes: usize,
    pub edges: usize,
    pub positive_edges: usize,
    pub negative_edges: usize,
    pub synergy_dominated: usize,
    pub tradeoff_dominated: usize,
    pub multi_indicator_clusters: usize,
    pub single_indicator_clusters: usize,
}

/// The India instance: 79 indicators, 2,643 edges (1,491 positive / 1,152
/// negative), 52 synergy- vs 27 trade-off-dominated, 4 multi-indicator and
/// 20 single-indicator clusters.
pub fn india_reference() -> ReferenceCounts {
    ReferenceCounts {
        nodes: 79,
        edges: 2643,
        positive_edges: 1491,
        negative_edges: 1152,
        synergy_dominated: 52,
        tradeoff_dominated: 27,
        multi_indicator_clusters: 4,
        single_indicator_clusters: 20,
    }
}

/// Side-by-side deviation table between a run and reference counts.
pub fn deviation_report(counts: &ManifestCounts, reference: &ReferenceCounts) -> String {
    let rows = [
        ("nodes", counts.nodes, reference.nodes),
        ("edges", counts.edges, reference.edges),
        (
            "positive_edges",
            counts.positive_edges,
            reference.positive_edges,
        ),
        (
            "negative_edges",
            counts.negative_edges,
            reference.negative_edges,
        ),
        (
            "synergy_dominated",
            counts.synergy_dominated,
            reference.synergy_dominated,
        ),
        (
            "tradeoff_dominated",
            counts.tradeoff_dominated,
            reference.tradeoff_dominated,
        ),
        (
            "multi_indicator_clusters",
            counts.multi_indicator_clusters,
            reference.multi_indicator_clusters,
        ),
        (
            "single_indicator_clusters",
            counts.single_indicator_clusters,
            reference.single_indicator_clusters,
        ),
    ];
    let mut out = String::from("metric,run,reference,delta\n");
    for (name, run, reference) in rows {
        out.push_str(&format!(
            "{name},{run},{reference},{}\n",
            run as i64 - reference as i64
        ));
    }
    out
}
