//! Synthetic panel generator with planted interlinkage structure.
//!
//! Each group follows a shared deterministic driver shape; members add
//! seeded Gaussian noise, so within-group lag-1 correlations sit near 1
//! while distinct shapes stay mutually near-orthogonal. Inverted members
//! track the negated driver and plant all-negative outgoing spillovers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Window;
use crate::numfmt::fmt_sig9;

/// Deterministic driver shapes. `Cycle` completes `periods` full cosine
/// cycles across the window; only one period keeps the lag-1
/// autocorrelation above the strong-edge threshold on a 25-year window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    RampUp,
    RampDown,
    Cycle { periods: u32 },
}

impl Shape {
    fn value(&self, t: usize, len: usize) -> f64 {
        let x = t as f64;
        let n = len as f64;
        match self {
            Shape::RampUp => -1.0 + 2.0 * x / (n - 1.0),
            Shape::RampDown => 1.0 - 2.0 * x / (n - 1.0),
            Shape::Cycle { periods } => {
                (2.0 * std::f64::consts::PI * *periods as f64 * x / n).cos()
            }
        }
    }
}

/// One planted group: `members` indicators follow the driver, plus
/// `inverted_members` indicators that follow its negation (their outgoing
/// links into the group are strongly negative).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    pub prefix: String,
    pub members: usize,
    #[serde(default)]
    pub inverted_members: usize,
    pub shape: Shape,
}

/// Full generator specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthSpec {
    pub window: Window,
    /// Driver amplitude around the 50-point midline.
    pub amplitude: f64,
    /// Standard deviation of per-member Gaussian noise.
    pub noise: f64,
    pub groups: Vec<GroupSpec>,
    /// Extra pure-noise indicators named `noise1..`.
    #[serde(default)]
    pub noise_series: usize,
}

impl SynthSpec {
    /// The 2-groups-of-4 recovery fixture: a ramp group and a one-period
    /// cycle group, plus one inverted driver attached to the ramp group.
    pub fn two_groups_of_four() -> Self {
        SynthSpec {
            window: Window {
                start: 2000,
                end: 2024,
            },
            amplitude: 30.0,
            noise: 0.5,
            groups: vec![
                GroupSpec {
                    prefix: "a".to_string(),
                    members: 4,
                    inverted_members: 1,
                    shape: Shape::RampUp,
                },
                GroupSpec {
                    prefix: "b".to_string(),
                    members: 4,
                    inverted_members: 0,
                    shape: Shape::Cycle { periods: 1 },
                },
            ],
            noise_series: 0,
        }
    }

    /// Indicators carrying only noise, for false-positive-rate checks.
    pub fn noise_only(series: usize, window: Window) -> Self {
        SynthSpec {
            window,
            amplitude: 0.0,
            noise: 10.0,
            groups: Vec::new(),
            noise_series: series,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.window.len() < 3 {
            return Err(Error::SynthSpec(format!(
                "window {}..{} has fewer than 3 years",
                self.window.start, self.window.end
            )));
        }
        if self.noise < 0.0 {
            return Err(Error::SynthSpec("noise must be non-negative".to_string()));
        }
        if self.amplitude < 0.0 {
            return Err(Error::SynthSpec(
                "amplitude must be non-negative".to_string(),
            ));
        }
        let planted: usize = self
            .groups
            .iter()
            .map(|g| g.members + g.inverted_members)
            .sum();
        if planted + self.noise_series < 2 {
            return Err(Error::SynthSpec(
                "spec must produce at least 2 indicators".to_string(),
            ));
        }
        for group in &self.groups {
            if group.prefix.is_empty() {
                return Err(Error::SynthSpec(
                    "group prefix must be non-empty".to_string(),
                ));
            }
            if group.prefix.contains([',', '"', '\n', '\r']) {
                return Err(Error::SynthSpec(format!(
                    "group prefix `{}` contains a comma, quote, or line break",
                    group.prefix
                )));
            }
            if group.members + group.inverted_members == 0 {
                return Err(Error::SynthSpec(format!(
                    "group `{}` has no members",
                    group.prefix
                )));
            }
        }
        let mut prefixes: Vec<&str> = self.groups.iter().map(|g| g.prefix.as_str()).collect();
        prefixes.sort_unstable();
        prefixes.dedup();
        if prefixes.len() != self.groups.len() {
            return Err(Error::SynthSpec(
                "group prefixes must be unique".to_string(),
            ));
        }
        Ok(())
    }
}

/// Ground truth emitted alongside a generated panel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthTruth {
    pub seed: u64,
    pub window: Window,
    /// Positive members per group: the expected multi-indicator clusters of
    /// the strong-synergy network (groups of size 1 stay singletons).
    pub expected_multi_clusters: Vec<Vec<String>>,
    /// Inverted members: expected trade-off-dominated indicators.
    pub expected_tradeoff_dominated: Vec<String>,
    pub noise_series: Vec<String>,
}

/// A generated panel as CSV text plus its ground truth.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub panel_csv: String,
    pub truth: SynthTruth,
}

/// Generate a wide CSV panel with the planted structure of `spec`.
///
/// All randomness derives from `seed`; identical (spec, seed) inputs yield
/// byte-identical output.
pub fn generate_synthetic(spec: &SynthSpec, seed: u64) -> Result<SynthOutput> {
    spec.validate()?;
    let len = spec.window.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;

    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    let mut expected_multi_clusters = Vec::new();
    let mut expected_tradeoff = Vec::new();

    let sample_series = |sign: f64, shape: Option<Shape>, rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..len)
            .map(|t| {
                let driver = shape.map_or(0.0, |s| s.value(t, len));
                let z: f64 = normal.sample(rng);
                (50.0 + spec.amplitude * sign * driver + spec.noise * z).clamp(0.0, 100.0)
            })
            .collect()
    };

    for group in &spec.groups {
        let mut positive_ids = Vec::new();
        for k in 1..=group.members {
            let id = format!("{}{k}", group.prefix);
            columns.push((id.clone(), sample_series(1.0, Some(group.shape), &mut rng)));
            positive_ids.push(id);
        }
        for k in 1..=group.inverted_members {
            let id = format!("{}_inv{k}", group.prefix);
            columns.push((id.clone(), sample_series(-1.0, Some(group.shape), &mut rng)));
            expected_tradeoff.push(id);
        }
        if positive_ids.len() >= 2 {
            expected_multi_clusters.push(positive_ids);
        }
    }

    let mut noise_ids = Vec::new();
    for k in 1..=spec.noise_series {
        let id = format!("noise{k}");
        columns.push((id.clone(), sample_series(0.0, None, &mut rng)));
        noise_ids.push(id);
    }

    let mut csv = String::from("year");
    for (id, _) in &columns {
        csv.push(',');
        csv.push_str(id);
    }
    csv.push('\n');
    for (t, year) in spec.window.years().enumerate() {
        let _ = write!(csv, "{year}");
        for (_, values) in &columns {
            csv.push(',');
            csv.push_str(&fmt_sig9(values[t]));
        }
        csv.push('\n');
    }

    Ok(SynthOutput {
        panel_csv: csv,
        truth: SynthTruth {
            seed,
            window: spec.window,
            expected_multi_clusters,
            expected_tradeoff_dominated: expected_tradeoff,
            noise_series: noise_ids,
        },
    })
}

/// Generate and write `panel.csv` plus a `truth.json` next to it. Returns
/// the truth-file path.
pub fn write_synthetic(spec: &SynthSpec, seed: u64, out_csv: impl AsRef<Path>) -> Result<PathBuf> {
    let out_csv = out_csv.as_ref();
    let output = generate_synthetic(spec, seed)?;
    if let Some(parent) = out_csv.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    fs::write(out_csv, &output.panel_csv).map_err(|source| Error::Io {
        path: out_csv.to_path_buf(),
        source,
    })?;
    let truth_path = out_csv.with_file_name("truth.json");
    let truth_json = serde_json::to_string_pretty(&output.truth)?;
    fs::write(&truth_path, truth_json).map_err(|source| Error::Io {
        path: truth_path.clone(),
        source,
    })?;
    Ok(truth_path)
}

/// Read a generator spec from JSON.
pub fn load_spec(path: impl AsRef<Path>) -> Result<SynthSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}
