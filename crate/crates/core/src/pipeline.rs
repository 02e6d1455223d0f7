//! End-to-end smell detection on one dependency graph.

use serde::Serialize;

use crate::consensus::{
    build_coassociation, classify_apt_with, degenerate_tools, CoAssociationMatrix, ConsensusMode,
};
use crate::depgraph::DependencyGraph;
use crate::error::{Error, Result};
use crate::modularize::{run_portfolio, ModularSolution, PortfolioConfig, SolutionDoc, VARIANT_TAG};
use crate::smells::{
    detect, prevalence, suppress_body_header, PairSmellRecord, PrevalenceStats, RecordDoc, UniverseStats,
};
use crate::structure::{recover_modules, ActualStructure};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectConfig {
    /// Enabled tools and the wca/limbo cut. Without an explicit `k` the cut
    /// is the number of actual modules.
    pub portfolio: PortfolioConfig,
    pub mode: ConsensusMode,
    /// Drop InSep records between a C/C++ body and its header.
    pub suppress_body_header: bool,
}

#[derive(Debug, Clone)]
pub struct Detection {
    pub solutions: Vec<ModularSolution>,
    pub actual: ActualStructure,
    pub matrix: CoAssociationMatrix,
    pub records: Vec<PairSmellRecord>,
    pub suppressed: Vec<PairSmellRecord>,
    pub universe: UniverseStats,
    pub stats: PrevalenceStats,
    /// Tools that returned a single all-encompassing module.
    pub degenerate: Vec<String>,
    /// The cut used for wca and limbo.
    pub k: usize,
}

pub fn detect_pipeline(graph: &DependencyGraph, config: &DetectConfig) -> Result<Detection> {
    graph.ensure_nonempty()?;
    config.mode.validate()?;
    let tools = config.portfolio.ordered_tools();
    if tools.len() < 2 {
        return Err(Error::Parameter(format!(
            "consensus needs at least two algorithms, {} enabled",
            tools.len()
        )));
    }
    let actual = recover_modules(graph.entities());
    let k = config.portfolio.k.unwrap_or(actual.module_count());
    let portfolio = PortfolioConfig {
        k: Some(k),
        ..config.portfolio.clone()
    };
    let solutions = run_portfolio(graph, &portfolio)?;
    let matrix = build_coassociation(&solutions)?;
    let apt = classify_apt_with(&matrix, config.mode);
    let all = detect(&apt, &actual)?;
    let (records, suppressed) = if config.suppress_body_header {
        suppress_body_header(all, graph.entities())
    } else {
        (all, Vec::new())
    };
    let universe = UniverseStats::new(&apt, &actual)?;
    let stats = prevalence(&records, &universe);
    let degenerate = degenerate_tools(&solutions);
    Ok(Detection {
        solutions,
        actual,
        matrix,
        records,
        suppressed,
        universe,
        stats,
        degenerate,
        k,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub entities: Vec<String>,
    pub tools: Vec<String>,
    pub variant: &'static str,
    pub k: usize,
    /// `"unanimity"` or `"threshold"`.
    pub consensus: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub degenerate_tools: Vec<String>,
    pub suppress_body_header: bool,
}

/// The smell report written as `smells.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmellReport {
    pub records: Vec<RecordDoc>,
    pub suppressed: Vec<RecordDoc>,
    pub stats: PrevalenceStats,
    pub metadata: ReportMetadata,
}

impl Detection {
    pub fn report(&self, graph: &DependencyGraph, config: &DetectConfig) -> SmellReport {
        let docs = |rs: &[PairSmellRecord]| rs.iter().map(|r| RecordDoc::new(r, graph.entities())).collect();
        let (consensus, threshold) = match config.mode {
            ConsensusMode::Unanimity => ("unanimity", None),
            ConsensusMode::Threshold(t) => ("threshold", Some(t)),
        };
        SmellReport {
            records: docs(&self.records),
            suppressed: docs(&self.suppressed),
            stats: self.stats.clone(),
            metadata: ReportMetadata {
                entities: graph.entities().iter().map(|e| e.path.clone()).collect(),
                tools: self.solutions.iter().map(|s| s.tool().to_string()).collect(),
                variant: VARIANT_TAG,
                k: self.k,
                consensus,
                threshold,
                degenerate_tools: self.degenerate.clone(),
                suppress_body_header: config.suppress_body_header,
            },
        }
    }

    /// Portfolio solutions followed by the actual structure.
    pub fn solution_docs(&self) -> Vec<SolutionDoc> {
        self.solutions
            .iter()
            .map(ModularSolution::to_doc)
            .chain(std::iter::once(self.actual.to_doc()))
            .collect()
    }
}
