use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use pairsmell::cochange::{ingest_log, k_ratio, smelly_and_baseline, ChangeHistory, KRatioOutcome, Metric};
use pairsmell::depgraph::{
    export_canonical, load_canonical_with, load_depends_json_with, scan_sources_with, DependencyGraph, Entity,
    LoadOptions,
};
use pairsmell::evolution::{
    fit_trend, sample_snapshots, series_percentages, SeriesKind, DEFAULT_ALPHA, DEFAULT_INTERVAL_DAYS,
    DEFAULT_SNAPSHOT_COUNT,
};
use pairsmell::pipeline::{detect_pipeline, DetectConfig};
use pairsmell::smells::{records_to_csv, render_dsm, PairSmellRecord, RecordDoc, SmellForm, DSM_DEFAULT_LIMIT};
use pairsmell::structure::recover_modules;

mod config;
mod git;

use config::{out_dir, read_input, write_output, DetectArgs, FileConfig, GraphArgs, GraphSource};

/// Bad user input that did not come from the library.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

#[derive(Parser)]
#[command(name = "pairsmell", version, about = "Find file pairs whose folder placement disagrees with their dependencies")]
struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect InSep and InCol pairs and write reports.
    Detect(DetectCmd),
    /// Compare co-change of smelly and non-smelly pairs.
    Cochange(CochangeCmd),
    /// Track smell percentages over sampled snapshots.
    Evolve(EvolveCmd),
    /// Print a design-structure matrix of co-association values.
    Dsm(DsmCmd),
    /// Write the dependency graph in canonical JSON.
    ExportGraph(ExportCmd),
}

#[derive(Args)]
struct DetectCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    detect: DetectArgs,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Report formats, comma-separated: json, csv.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    format: Option<Vec<String>>,
    /// Export every pair of the co-association matrix, not just unanimous ones.
    #[arg(long)]
    full_matrix: bool,
}

#[derive(Args)]
struct CochangeCmd {
    /// smells.json written by `detect`.
    #[arg(long, value_name = "FILE")]
    smells: Option<PathBuf>,
    /// Pre-captured numstat log.
    #[arg(long, value_name = "FILE")]
    log: Option<PathBuf>,
    /// Repository to read the log from.
    #[arg(long, value_name = "DIR")]
    repo: Option<PathBuf>,
    /// Anchor revision.
    #[arg(long)]
    rev: Option<String>,
    /// Window sizes in commits, comma-separated.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    delta: Option<Vec<usize>>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    detect: DetectArgs,
    #[arg(long, value_name = "DIR")]
    repo: Option<PathBuf>,
    #[arg(long)]
    rev: Option<String>,
    #[arg(long)]
    interval_days: Option<u32>,
    #[arg(long)]
    snapshots: Option<usize>,
    /// Significance level of the trend test.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DsmCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    detect: DetectArgs,
    /// Entity paths or ids to show, comma-separated. Defaults to all.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    entities: Option<Vec<String>>,
    #[arg(long)]
    limit: Option<usize>,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportCmd {
    #[command(flatten)]
    graph: GraphArgs,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<pairsmell::Error>() {
            return match e {
                pairsmell::Error::InsufficientData(_) => 3,
                pairsmell::Error::Io { .. } => 2,
                e if e.is_input_error() => 2,
                _ => 1,
            };
        }
        if cause.is::<InputError>() {
            return 2;
        }
    }
    1
}

fn run(cli: Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Detect(cmd) => detect(cmd, &file),
        Command::Cochange(cmd) => cochange(cmd, &file),
        Command::Evolve(cmd) => evolve(cmd, &file),
        Command::Dsm(cmd) => dsm(cmd, &file),
        Command::ExportGraph(cmd) => export_graph(cmd, &file),
    }
}

fn load_graph(args: &GraphArgs, file: &FileConfig) -> Result<DependencyGraph> {
    let opts = args.load_options(file)?;
    let graph = match args.source(file)? {
        GraphSource::Canonical(p) => load_canonical_with(read_input(&p)?.as_bytes(), &opts),
        GraphSource::Depends(p) => load_depends_json_with(read_input(&p)?.as_bytes(), &opts),
        GraphSource::Scan(profile, root) => scan_sources_with(&root, profile, &opts),
    };
    graph.context("loading dependency graph")
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn detect(cmd: DetectCmd, file: &FileConfig) -> Result<()> {
    let formats = cmd
        .format
        .clone()
        .or_else(|| file.format.clone())
        .unwrap_or_else(|| vec!["json".into()]);
    let (mut want_json, mut want_csv) = (false, false);
    for f in &formats {
        match f.trim() {
            "json" => want_json = true,
            "csv" => want_csv = true,
            other => return Err(InputError(format!("unknown format {other:?} (expected json or csv)")).into()),
        }
    }
    let config = cmd.detect.config(file)?;
    let graph = load_graph(&cmd.graph, file)?;
    let detection = detect_pipeline(&graph, &config)?;
    let report = detection.report(&graph, &config);
    let out = out_dir(&cmd.out, file);

    write_output(&out, "solutions.json", &to_json(&detection.solution_docs()))?;
    write_output(&out, "coassociation.csv", &detection.matrix.to_csv(cmd.full_matrix))?;
    if want_json {
        write_output(&out, "smells.json", &to_json(&report))?;
    }
    if want_csv {
        write_output(&out, "smells.csv", &records_to_csv(&report.records))?;
    }
    write_output(&out, "prevalence.json", &to_json(&report.stats))?;
    eprintln!(
        "{} entities, {} InSep, {} InCol -> {}",
        graph.len(),
        report.stats.insep_pairs,
        report.stats.incol_pairs,
        out.display()
    );
    Ok(())
}

/// The parts of `smells.json` that `cochange` needs.
#[derive(Deserialize)]
struct SmellFile {
    records: Vec<RecordDoc>,
    metadata: SmellFileMeta,
}

#[derive(Deserialize)]
struct SmellFileMeta {
    entities: Vec<String>,
}

#[derive(Serialize)]
struct WindowReport {
    delta: usize,
    commits_used: usize,
    shortfall: bool,
    insep: Vec<KRatioOutcome>,
    incol: Vec<KRatioOutcome>,
}

fn cochange(cmd: CochangeCmd, file: &FileConfig) -> Result<()> {
    let smells_path = cmd
        .smells
        .clone()
        .ok_or_else(|| InputError("--smells <FILE> is required".into()))?;
    let smells: SmellFile = serde_json::from_str(&read_input(&smells_path)?)
        .map_err(|e| InputError(format!("bad smell report {}: {e}", smells_path.display())))?;
    let entities: Vec<Entity> = smells
        .metadata
        .entities
        .iter()
        .enumerate()
        .map(|(id, path)| Entity { id, path: path.clone() })
        .collect();
    let index = |p: &str| {
        entities
            .iter()
            .position(|e| e.path == p)
            .ok_or_else(|| InputError(format!("smell record names unknown entity {p:?}")))
    };
    let mut records = Vec::with_capacity(smells.records.len());
    for r in &smells.records {
        let (a, b) = (index(&r.a)?, index(&r.b)?);
        records.push(PairSmellRecord {
            a: a.min(b),
            b: a.max(b),
            actual: r.actual,
            apt: r.apt,
            form: r.form,
            coassoc: f64::from(r.apt),
        });
    }

    let log = match (cmd.log.clone().or_else(|| file.log.clone()), cmd.repo.clone().or_else(|| file.repo.clone())) {
        (Some(path), None) => read_input(&path)?,
        (None, Some(repo)) => {
            let rev = cmd.rev.clone().or_else(|| file.rev.clone()).unwrap_or_else(|| "HEAD".into());
            git::numstat_log(&repo, &rev)?
        }
        _ => return Err(InputError("exactly one of --log or --repo is required".into()).into()),
    };
    let commits = ingest_log(&log)?;
    let deltas = cmd
        .delta
        .clone()
        .or_else(|| file.delta.clone())
        .unwrap_or_else(|| vec![100, 200, 300]);

    let actual = recover_modules(&entities);
    let (insep, insep_base) = smelly_and_baseline(SmellForm::InSep, &records, &actual);
    let (incol, incol_base) = smelly_and_baseline(SmellForm::InCol, &records, &actual);
    let mut windows = Vec::new();
    for &delta in &deltas {
        let history = ChangeHistory::window(&commits, delta, &entities)?;
        let outcomes = |smelly: &[(usize, usize)], base: &[(usize, usize)]| {
            Metric::ALL
                .iter()
                .map(|&m| k_ratio(&history, m, smelly, base))
                .collect::<Vec<_>>()
        };
        windows.push(WindowReport {
            delta,
            commits_used: history.commits_used(),
            shortfall: history.shortfall(),
            insep: outcomes(&insep, &insep_base),
            incol: outcomes(&incol, &incol_base),
        });
    }
    let report = json!({
        "metadata": {
            "commits": commits.len(),
            "smelly_pairs": { "insep": insep.len(), "incol": incol.len() },
            "baseline_pairs": { "insep": insep_base.len(), "incol": incol_base.len() },
            "test": "welch",
            "effect_size": "cohens_d_pooled",
            "developer_identity": "author_email",
            "renames": "new_path_only",
            "zero_denominator": "zero",
        },
        "windows": windows,
    });
    let out = out_dir(&cmd.out, file);
    write_output(&out, "cochange.json", &to_json(&report))?;
    eprintln!("{} commits, {} windows -> {}", commits.len(), deltas.len(), out.display());
    Ok(())
}

fn evolve(cmd: EvolveCmd, file: &FileConfig) -> Result<()> {
    let repo = cmd
        .repo
        .clone()
        .or_else(|| file.repo.clone())
        .ok_or_else(|| InputError("--repo <DIR> is required".into()))?;
    let rev = cmd.rev.clone().or_else(|| file.rev.clone()).unwrap_or_else(|| "HEAD".into());
    let interval = cmd.interval_days.or(file.interval_days).unwrap_or(DEFAULT_INTERVAL_DAYS);
    let count = cmd.snapshots.or(file.snapshots).unwrap_or(DEFAULT_SNAPSHOT_COUNT);
    let alpha = cmd.alpha.or(file.alpha).unwrap_or(DEFAULT_ALPHA);
    let profile = cmd.graph.profile(file)?;
    let opts: LoadOptions = cmd.graph.load_options(file)?;
    let config: DetectConfig = cmd.detect.config(file)?;

    let anchor = git::resolve(&repo, &rev)?;
    let history = git::revisions(&repo, &anchor)?;
    let snapshots = sample_snapshots(&history, interval, count, &anchor)?;
    let scratch = tempfile::tempdir().context("creating scratch directory")?;
    let series = series_percentages(&snapshots, |snap| {
        let dir = scratch.path().join(&snap.id);
        std::fs::create_dir_all(&dir).map_err(|e| pairsmell::Error::Parameter(e.to_string()))?;
        git::extract(&repo, &snap.id, &dir).map_err(|e| pairsmell::Error::Parameter(format!("{e:#}")))?;
        let graph = scan_sources_with(&dir, profile, &opts)?;
        Ok(detect_pipeline(&graph, &config)?.stats)
    });

    let out = out_dir(&cmd.out, file);
    write_output(&out, "series.csv", &series.to_csv())?;
    for (t, msg) in &series.failures {
        eprintln!("snapshot {} ({}) skipped: {msg}", t + 1, series.snapshots[*t].id);
    }
    let mut trends = serde_json::Map::new();
    for kind in SeriesKind::ALL {
        let trend = fit_trend(&series.values(kind), alpha).context("fitting trend")?;
        trends.insert(kind.to_string(), serde_json::to_value(trend)?);
    }
    let report = json!({
        "alpha": alpha,
        "interval_days": interval,
        "requested_snapshots": count,
        "snapshots": series.snapshots.iter().enumerate().map(|(t, s)| json!({
            "index": t + 1,
            "id": s.id,
            "timestamp": s.timestamp,
            "ok": series.points[t].is_some(),
        })).collect::<Vec<_>>(),
        "trends": trends,
    });
    write_output(&out, "trend.json", &to_json(&report))?;
    eprintln!("{} snapshots -> {}", series.snapshots.len(), out.display());
    Ok(())
}

fn dsm(cmd: DsmCmd, file: &FileConfig) -> Result<()> {
    let config = cmd.detect.config(file)?;
    let graph = load_graph(&cmd.graph, file)?;
    let detection = detect_pipeline(&graph, &config)?;
    let ids: Vec<usize> = match &cmd.entities {
        None => (0..graph.len()).collect(),
        Some(list) => list
            .iter()
            .map(|s| {
                let s = s.trim();
                graph
                    .index_of(s)
                    .or_else(|| s.parse().ok())
                    .ok_or_else(|| InputError(format!("unknown entity {s:?}")).into())
            })
            .collect::<Result<_>>()?,
    };
    let limit = cmd.limit.or(file.limit).unwrap_or(DSM_DEFAULT_LIMIT);
    let text = render_dsm(&ids, &detection.matrix, &detection.actual, graph.entities(), limit)?;
    match &cmd.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn export_graph(cmd: ExportCmd, file: &FileConfig) -> Result<()> {
    let graph = load_graph(&cmd.graph, file)?;
    let text = export_canonical(&graph);
    match &cmd.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
