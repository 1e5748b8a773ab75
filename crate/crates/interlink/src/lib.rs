//! Directed indicator interlinkage networks.
//!
//! `interlink` turns panels of normalized indicator time series into a
//! directed weighted network of statistically significant lagged
//! correlations and derives policy-facing summaries from it:
//!
//! - [`ingest`] loads and filters wide CSV panels;
//! - [`netbuild`] estimates lagged correlations, applies the p < 0.05 gate,
//!   and resolves bidirectional conflicts by dominance;
//! - [`graph`] holds the network and extracts the positive (G+) and
//!   strong-synergy subnetworks;
//! - [`classify`] labels indicators synergy- or trade-off-dominated from
//!   the balance of outgoing spillovers;
//! - [`centrality`] ranks synergy-dominated indicators by Opsahl
//!   out-centrality;
//! - [`flowclust`] clusters the strong-synergy network by map-equation
//!   codelength minimization;
//! - [`prioritise`] assembles the cluster-diversified prioritised set;
//! - [`pipeline`] orchestrates the whole run and writes the report files;
//! - [`synth`] generates planted-structure panels for testing.
//!
//! The `interlink` binary exposes the pipeline as `interlink run`, the
//! generator as `interlink synth`, and a long-to-wide CSV converter as
//! `interlink widen`. See the crate examples for library usage, one per
//! capability:
//!
//! ```bash
//! cargo run -p interlink --example full_pipeline
//! ```

pub mod centrality;
pub mod classify;
pub mod error;
pub mod export;
pub mod flowclust;
pub mod graph;
pub mod ingest;
pub mod netbuild;
pub mod numfmt;
pub mod pipeline;
pub mod prioritise;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
