//! Deterministic modularization algorithms.
//!
//! Four algorithms produce flat partitions of a [`DependencyGraph`]:
//!
//! | tool    | family                                   | needs `k` |
//! |---------|------------------------------------------|-----------|
//! | `wca`   | agglomerative, UENM similarity           | yes       |
//! | `limbo` | agglomerative information bottleneck     | yes       |
//! | `acdc`  | pattern-driven (body-header, dominator)  | no        |
//! | `fca`   | greedy TurboMQ agglomeration             | no        |
//!
//! They are self-contained variants of the classic architecture-recovery
//! tools of the same names; solutions carry the [`VARIANT_TAG`] marker so
//! output is never mistaken for the original implementations. Every tie is
//! broken by smallest member entity id, so each algorithm is a pure function
//! of the graph.

mod acdc;
mod agglomerate;
mod fca;
mod limbo;
mod wca;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::depgraph::DependencyGraph;
use crate::error::{Error, Result};

pub use acdc::{acdc, AcdcConfig, DEFAULT_MAX_CLUSTER_SIZE};
pub(crate) use acdc::{is_body, is_header, split_path};
pub use fca::{fca, turbo_mq};
pub use limbo::{limbo, limbo_merge_cost};
pub use wca::{uenm_similarity, wca};

pub const VARIANT_TAG: &str = "pairsmell-variant";

/// A total partition of entities `0..n` into modules.
///
/// Module ids are contiguous and ordered by each module's smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularSolution {
    assignment: Vec<usize>,
    module_count: usize,
    tool: String,
}

impl ModularSolution {
    /// Builds a solution from arbitrary per-entity labels, renumbering
    /// modules canonically.
    pub fn from_labels<L: Ord + Clone>(labels: &[L], tool: impl Into<String>) -> Self {
        let mut seen: std::collections::BTreeMap<L, usize> = Default::default();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = seen.len();
                *seen.entry(l.clone()).or_insert(next)
            })
            .collect();
        Self {
            assignment,
            module_count: seen.len(),
            tool: tool.into(),
        }
    }

    /// Builds a solution from explicit member lists, which must cover
    /// `0..n` exactly once.
    pub fn from_modules(modules: &[Vec<usize>], n: usize, tool: impl Into<String>) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (m, members) in modules.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::Validation(format!("module {m} is empty")));
            }
            for &e in members {
                if e >= n {
                    return Err(Error::Validation(format!("entity {e} out of range for n={n}")));
                }
                if labels[e] != usize::MAX {
                    return Err(Error::Validation(format!("entity {e} assigned twice")));
                }
                labels[e] = m;
            }
        }
        if let Some(e) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Validation(format!("entity {e} has no module")));
        }
        Ok(Self::from_labels(&labels, tool))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn module_of(&self, entity: usize) -> usize {
        self.assignment[entity]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn module_count(&self) -> usize {
        self.module_count
    }

    pub fn tool(&self) -> &str {
        &self.tool
    }

    /// Member lists in canonical module order, each ascending.
    pub fn modules(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.module_count];
        for (e, &m) in self.assignment.iter().enumerate() {
            out[m].push(e);
        }
        out
    }

    pub fn to_doc(&self) -> SolutionDoc {
        SolutionDoc {
            tool: self.tool.clone(),
            variant: (self.tool != "actual").then(|| VARIANT_TAG.to_string()),
            modules: self.modules(),
            folders: None,
        }
    }
}

/// JSON form of a solution: `{"tool":"wca","modules":[[0,3,5],[1,2,4]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub tool: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub modules: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folders: Option<Vec<String>>,
}

impl SolutionDoc {
    pub fn into_solution(self, n: usize) -> Result<ModularSolution> {
        ModularSolution::from_modules(&self.modules, n, self.tool)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tool {
    Wca,
    Limbo,
    Acdc,
    Fca,
}

impl Tool {
    /// Portfolio order.
    pub const ALL: [Tool; 4] = [Tool::Wca, Tool::Limbo, Tool::Acdc, Tool::Fca];

    pub fn name(self) -> &'static str {
        match self {
            Tool::Wca => "wca",
            Tool::Limbo => "limbo",
            Tool::Acdc => "acdc",
            Tool::Fca => "fca",
        }
    }

    pub fn needs_k(self) -> bool {
        matches!(self, Tool::Wca | Tool::Limbo)
    }
}

impl fmt::Display for Tool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tool {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tool::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown tool {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioConfig {
    pub tools: Vec<Tool>,
    /// Cut for `wca` and `limbo`. Required when either is enabled.
    pub k: Option<usize>,
    pub acdc: AcdcConfig,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        Self {
            tools: Tool::ALL.to_vec(),
            k: None,
            acdc: AcdcConfig::default(),
        }
    }
}

impl PortfolioConfig {
    /// Enabled tools, deduplicated, in portfolio order.
    pub fn ordered_tools(&self) -> Vec<Tool> {
        let mut tools = self.tools.clone();
        tools.sort();
        tools.dedup();
        tools
    }
}

pub fn run_tool(graph: &DependencyGraph, tool: Tool, config: &PortfolioConfig) -> Result<ModularSolution> {
    let k = || {
        config
            .k
            .ok_or_else(|| Error::Parameter(format!("{tool} needs a cluster count k")))
    };
    match tool {
        Tool::Wca => wca(graph, k()?),
        Tool::Limbo => limbo(graph, k()?),
        Tool::Acdc => Ok(acdc(graph, &config.acdc)),
        Tool::Fca => Ok(fca(graph)),
    }
}

/// Runs every enabled algorithm and returns their solutions in portfolio
/// order. The algorithms run on separate threads; the result does not
/// depend on scheduling. Any failure aborts the whole portfolio.
pub fn run_portfolio(graph: &DependencyGraph, config: &PortfolioConfig) -> Result<Vec<ModularSolution>> {
    let tools = config.ordered_tools();
    let results: Vec<Result<ModularSolution>> = std::thread::scope(|s| {
        let handles: Vec<_> = tools
            .iter()
            .map(|&tool| s.spawn(move || run_tool(graph, tool, config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("modularization thread panicked"))
            .collect()
    });
    tools
        .into_iter()
        .zip(results)
        .map(|(tool, r)| {
            r.map_err(|e| Error::Tool {
                tool: tool.name(),
                source: Box::new(e),
            })
        })
        .collect()
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("k={k} must lie in 1..={n}")));
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod test_graphs {
    use crate::depgraph::{DependencyGraph, RawEdge};

    pub fn graph(n: usize, edges: &[(usize, usize)]) -> DependencyGraph {
        let paths = (0..n).map(|i| format!("f{i:02}.java")).collect();
        let edges = edges
            .iter()
            .map(|&(src, dst)| RawEdge {
                src,
                dst,
                kind: "dep".into(),
                weight: 1,
            })
            .collect();
        DependencyGraph::new(paths, edges).unwrap()
    }

    /// Two directed cliques of `size` nodes, `0..size` and `size..2*size`,
    /// joined by one edge from the last node of the first to the first of
    /// the second.
    pub fn two_cliques(size: usize) -> DependencyGraph {
        let mut edges = Vec::new();
        for block in [0, size] {
            for i in block..block + size {
                for j in block..block + size {
                    if i != j {
                        edges.push((i, j));
                    }
                }
            }
        }
        edges.push((size - 1, size));
        graph(2 * size, &edges)
    }
}
