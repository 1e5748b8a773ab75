//! Thin CLI over the `interlink` library: `run`, `synth`, and `widen`.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use interlink::error::{Error, Result};
use interlink::ingest::Window;
use interlink::netbuild::CorrelationMethod;
use interlink::numfmt::fmt_sig9;
use interlink::pipeline::{run_pipeline, RunConfig};
use interlink::synth;

#[derive(Parser)]
#[command(
    name = "interlink",
    version,
    about = "Directed indicator interlinkage networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write all report files.
    Run(RunArgs),
    /// Generate a synthetic panel with planted structure.
    Synth(SynthArgs),
    /// Convert a long-format CSV (year,id,value) to the wide panel format.
    Widen(WidenArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Wide CSV panel: `year,<id1>,<id2>,...`
    #[arg(long)]
    input: Option<PathBuf>,
    /// Optional `id,label,sdg` metadata CSV.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Analysis window, e.g. `2000:2024`.
    #[arg(long)]
    window: Option<String>,
    /// Correlation lag in years.
    #[arg(long)]
    lag: Option<usize>,
    /// Significance threshold for retaining edges.
    #[arg(long)]
    sig: Option<f64>,
    /// Correlation estimator: pearson or spearman.
    #[arg(long)]
    method: Option<String>,
    /// Gate edges with Benjamini-Hochberg instead of the fixed threshold.
    #[arg(long)]
    fdr: bool,
    /// Minimum weight for the strong-synergy subnetwork.
    #[arg(long)]
    strong_threshold: Option<f64>,
    /// Opsahl centrality tuning parameter.
    #[arg(long)]
    opsahl_alpha: Option<f64>,
    /// Random-walk teleportation rate.
    #[arg(long)]
    teleport: Option<f64>,
    /// Number of clustering search trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Master seed; every stage derives its randomness from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the report files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Turn out-of-range values into an error instead of a warning.
    #[arg(long)]
    strict: bool,
    /// Cap on within-stage parallelism (INTERLINK_THREADS as fallback).
    #[arg(long)]
    threads: Option<usize>,
    /// Size of the redundancy report over the centrality ranking.
    #[arg(long)]
    top_n: Option<usize>,
    /// Optional key=value config file; CLI flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator spec (JSON). Omit to use the bundled 2-groups-of-4 fixture.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output panel CSV path; `truth.json` is written alongside.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WidenArgs {
    /// Long-format CSV with a `year,id,value` header.
    #[arg(long)]
    input: PathBuf,
    /// Output wide CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Widen(args) => cmd_widen(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Key=value pairs from a config file; `#` starts a comment line.
fn read_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Load {
            location: format!("{} line {}", path.display(), idx + 1),
            message: "expected key=value".to_string(),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_from<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse().map(Some).map_err(|_| Error::Load {
            location: format!("config key `{key}`"),
            message: format!("cannot parse `{raw}`"),
        }),
    }
}

/// Resolve flags > config file > defaults into a `RunConfig`.
fn resolve_config(args: RunArgs) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };

    let input = args
        .input
        .or_else(|| file.get("input").map(PathBuf::from))
        .ok_or_else(|| Error::Load {
            location: "--input".to_string(),
            message: "an input panel is required".to_string(),
        })?;
    let out_dir = args
        .out
        .or_else(|| file.get("out").map(PathBuf::from))
        .ok_or_else(|| Error::Load {
            location: "--out".to_string(),
            message: "an output directory is required".to_string(),
        })?;
    let window_raw = args
        .window
        .or_else(|| file.get("window").cloned())
        .unwrap_or_else(|| "2000:2024".to_string());
    let window = Window::parse_flag(&window_raw)?;

    let mut config = RunConfig::new(input, out_dir, window);
    config.meta = args.meta.or_else(|| file.get("meta").map(PathBuf::from));
    if let Some(v) = args.lag.or(parse_from(&file, "lag")?) {
        config.lag = v;
    }
    if let Some(v) = args.sig.or(parse_from(&file, "sig")?) {
        config.sig = v;
    }
    let method_raw = args.method.or_else(|| file.get("method").cloned());
    if let Some(raw) = method_raw {
        config.method = CorrelationMethod::parse_flag(&raw)?;
    }
    config.fdr = args.fdr
        || matches!(
            file.get("fdr").map(String::as_str),
            Some("true") | Some("1")
        );
    if let Some(v) = args
        .strong_threshold
        .or(parse_from(&file, "strong-threshold")?)
    {
        config.strong_threshold = v;
    }
    if let Some(v) = args.opsahl_alpha.or(parse_from(&file, "opsahl-alpha")?) {
        config.opsahl_alpha = v;
    }
    if let Some(v) = args.teleport.or(parse_from(&file, "teleport")?) {
        config.teleport = v;
    }
    if let Some(v) = args.trials.or(parse_from(&file, "trials")?) {
        config.trials = v;
    }
    if let Some(v) = args.seed.or(parse_from(&file, "seed")?) {
        config.seed = v;
    }
    config.strict = args.strict
        || matches!(
            file.get("strict").map(String::as_str),
            Some("true") | Some("1")
        );
    config.threads = args.threads.or(parse_from(&file, "threads")?);
    if let Some(v) = args.top_n.or(parse_from(&file, "top-n")?) {
        config.top_n = v;
    }
    Ok(config)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let config = resolve_config(args)?;
    let (manifest, artifacts) = run_pipeline(&config)?;

    if !artifacts.range_violations.is_empty() {
        eprintln!(
            "warning: {} value(s) outside [0,100]; first: {} = {} in {}",
            artifacts.range_violations.len(),
            artifacts.range_violations[0].id,
            fmt_sig9(artifacts.range_violations[0].value),
            artifacts.range_violations[0].year
        );
    }
    for drop in &artifacts.drop_report {
        eprintln!("note: dropped `{}` ({})", drop.id, drop.reason.as_str());
    }

    let c = &manifest.counts;
    println!(
        "network: {} nodes, {} edges ({} positive / {} negative)",
        c.nodes, c.edges, c.positive_edges, c.negative_edges
    );
    println!(
        "classes: {} synergy-dominated, {} trade-off-dominated, {} unclassified",
        c.synergy_dominated, c.tradeoff_dominated, c.unclassified
    );
    println!(
        "clusters: {} multi-indicator, {} single-indicator (codelength {} bits)",
        c.multi_indicator_clusters,
        c.single_indicator_clusters,
        fmt_sig9(manifest.codelength)
    );
    println!(
        "prioritised: {} pick(s), {} cluster(s) skipped",
        c.picks, c.skipped_clusters
    );
    if let Some(redundancy) = &artifacts.redundancy {
        println!(
            "redundancy: top {} ranked indicators span {} cluster(s), concentration {}",
            redundancy.top_n,
            redundancy.membership.len(),
            fmt_sig9(redundancy.concentration)
        );
    }
    println!("reports written to {}", config.out_dir.display());
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let spec = match &args.spec {
        Some(path) => synth::load_spec(path)?,
        None => synth::SynthSpec::two_groups_of_four(),
    };
    let truth_path = synth::write_synthetic(&spec, args.seed, &args.out)?;
    println!("panel written to {}", args.out.display());
    println!("ground truth written to {}", truth_path.display());
    Ok(())
}

fn cmd_widen(args: WidenArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).map_err(|source| Error::Io {
        path: args.input.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Load {
        location: "header".to_string(),
        message: e.to_string(),
    })?;
    if headers.len() < 3 {
        return Err(Error::Load {
            location: "header".to_string(),
            message: "expected `year,id,value` columns".to_string(),
        });
    }
    let mut cells: BTreeMap<(i32, String), String> = BTreeMap::new();
    let mut ids: Vec<String> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 2;
        let record = record.map_err(|e| Error::Load {
            location: format!("row {row}"),
            message: e.to_string(),
        })?;
        let year: i32 = record[0].trim().parse().map_err(|_| Error::Load {
            location: format!("row {row}, column year"),
            message: format!("non-numeric year `{}`", &record[0]),
        })?;
        let id = record[1].trim().to_string();
        if !ids.contains(&id) {
            ids.push(id.clone());
        }
        cells.insert((year, id), record[2].trim().to_string());
    }
    ids.sort();
    let years: Vec<i32> = {
        let mut seen: Vec<i32> = cells.keys().map(|(y, _)| *y).collect();
        seen.sort_unstable();
        seen.dedup();
        seen
    };
    let mut out = String::from("year");
    for id in &ids {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for year in years {
        out.push_str(&year.to_string());
        for id in &ids {
            out.push(',');
            if let Some(value) = cells.get(&(year, id.clone())) {
                out.push_str(value);
            }
        }
        out.push('\n');
    }
    fs::write(&args.out, out).map_err(|source| Error::Io {
        path: args.out.clone(),
        source,
    })?;
    println!("wide panel written to {}", args.out.display());
    Ok(())
}
