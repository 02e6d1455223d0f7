//! Settings shared by the subcommands: TOML file values overridden by flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Deserialize;

use pairsmell::consensus::ConsensusMode;
use pairsmell::depgraph::{LanguageProfile, LoadOptions, PathFilter};
use pairsmell::modularize::{PortfolioConfig, Tool};
use pairsmell::pipeline::DetectConfig;

use crate::InputError;

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub graph: Option<PathBuf>,
    pub depends_json: Option<PathBuf>,
    pub scan: Option<String>,
    pub root: Option<PathBuf>,
    pub include: Option<Vec<String>>,
    pub exclude: Option<Vec<String>>,
    pub kind_weights: Option<BTreeMap<String, f64>>,
    pub k: Option<usize>,
    pub tools: Option<Vec<String>>,
    pub threshold: Option<f64>,
    pub suppress_body_header: Option<bool>,
    pub max_cluster_size: Option<usize>,
    pub delta: Option<Vec<usize>>,
    pub interval_days: Option<u32>,
    pub snapshots: Option<usize>,
    pub alpha: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Vec<String>>,
    pub log: Option<PathBuf>,
    pub repo: Option<PathBuf>,
    pub rev: Option<String>,
    pub limit: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read config {}: {e}", path.display())))?;
        let cfg = toml::from_str(&text)
            .map_err(|e| InputError(format!("bad config {}: {e}", path.display())))?;
        Ok(cfg)
    }
}

/// Where the dependency graph comes from.
#[derive(Debug, Clone, Args, Default)]
pub struct GraphArgs {
    /// Canonical graph JSON.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Extractor output in the Depends JSON layout.
    #[arg(long, value_name = "FILE")]
    pub depends_json: Option<PathBuf>,
    /// Scan source files with a language profile (java-imports, c-includes).
    #[arg(long, value_name = "PROFILE")]
    pub scan: Option<String>,
    /// Source root for --scan.
    #[arg(long, value_name = "DIR")]
    pub root: Option<PathBuf>,
    /// Keep only entities matching this glob. Repeatable.
    #[arg(long, value_name = "GLOB")]
    pub include: Vec<String>,
    /// Drop entities matching this glob. Repeatable.
    #[arg(long, value_name = "GLOB")]
    pub exclude: Vec<String>,
    /// Weight of a dependency kind, as KIND=WEIGHT. Repeatable.
    #[arg(long = "kind-weight", value_name = "KIND=W")]
    pub kind_weights: Vec<String>,
}

#[derive(Debug, Clone)]
pub enum GraphSource {
    Canonical(PathBuf),
    Depends(PathBuf),
    Scan(LanguageProfile, PathBuf),
}

impl GraphArgs {
    pub fn source(&self, file: &FileConfig) -> Result<GraphSource> {
        let graph = self.graph.clone().or_else(|| file.graph.clone());
        let depends = self.depends_json.clone().or_else(|| file.depends_json.clone());
        let scan = self.scan.clone().or_else(|| file.scan.clone());
        let chosen = [graph.is_some(), depends.is_some(), scan.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if chosen != 1 {
            return Err(InputError(
                "exactly one graph source is required: --graph, --depends-json or --scan".into(),
            )
            .into());
        }
        if let Some(p) = graph {
            return Ok(GraphSource::Canonical(p));
        }
        if let Some(p) = depends {
            return Ok(GraphSource::Depends(p));
        }
        let profile: LanguageProfile = scan.unwrap().parse().map_err(|e| InputError(format!("{e}")))?;
        let root = self.root.clone().or_else(|| file.root.clone()).unwrap_or_else(|| ".".into());
        Ok(GraphSource::Scan(profile, root))
    }

    /// The scan profile alone, for commands that scan snapshots.
    pub fn profile(&self, file: &FileConfig) -> Result<LanguageProfile> {
        let scan = self
            .scan
            .clone()
            .or_else(|| file.scan.clone())
            .ok_or_else(|| InputError("--scan <PROFILE> is required".into()))?;
        Ok(scan.parse().map_err(|e| InputError(format!("{e}")))?)
    }

    pub fn load_options(&self, file: &FileConfig) -> Result<LoadOptions> {
        let pick = |flag: &Vec<String>, cfg: &Option<Vec<String>>| {
            if flag.is_empty() {
                cfg.clone().unwrap_or_default()
            } else {
                flag.clone()
            }
        };
        let include = pick(&self.include, &file.include);
        let exclude = pick(&self.exclude, &file.exclude);
        let mut kind_weights = file.kind_weights.clone().unwrap_or_default();
        for kv in &self.kind_weights {
            let (k, w) = kv
                .split_once('=')
                .ok_or_else(|| InputError(format!("--kind-weight expects KIND=WEIGHT, got {kv:?}")))?;
            let w: f64 = w
                .parse()
                .map_err(|_| InputError(format!("bad weight in --kind-weight {kv:?}")))?;
            kind_weights.insert(k.to_string(), w);
        }
        if let Some((k, w)) = kind_weights.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(InputError(format!("weight of kind {k:?} must be positive, got {w}")).into());
        }
        Ok(LoadOptions {
            kind_weights,
            filter: PathFilter::new(&include, &exclude)?,
        })
    }
}

/// Portfolio and consensus settings.
#[derive(Debug, Clone, Args, Default)]
pub struct DetectArgs {
    /// Cluster count for wca and limbo. Defaults to the number of folders.
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated algorithms to run.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub tools: Option<Vec<String>>,
    /// Accept pairs at this co-association level instead of unanimity.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Drop InSep records between a C/C++ body and its header.
    #[arg(long)]
    pub suppress_body_header: bool,
    /// Largest cluster acdc forms around a dominator.
    #[arg(long)]
    pub max_cluster_size: Option<usize>,
}

impl DetectArgs {
    pub fn config(&self, file: &FileConfig) -> Result<DetectConfig> {
        let mut portfolio = PortfolioConfig::default();
        if let Some(names) = self.tools.clone().or_else(|| file.tools.clone()) {
            portfolio.tools = names
                .iter()
                .map(|n| n.trim().parse::<Tool>())
                .collect::<pairsmell::Result<_>>()?;
        }
        portfolio.k = self.k.or(file.k);
        if let Some(size) = self.max_cluster_size.or(file.max_cluster_size) {
            portfolio.acdc.max_cluster_size = size;
        }
        let mode = match self.threshold.or(file.threshold) {
            Some(t) => ConsensusMode::Threshold(t),
            None => ConsensusMode::Unanimity,
        };
        mode.validate()?;
        Ok(DetectConfig {
            portfolio,
            mode,
            suppress_body_header: self.suppress_body_header || file.suppress_body_header.unwrap_or(false),
        })
    }
}

pub fn out_dir(flag: &Option<PathBuf>, file: &FileConfig) -> PathBuf {
    flag.clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("pairsmell-out"))
}

pub fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())).into())
}

pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}
