//! File-level dependency graphs.
//!
//! A [`DependencyGraph`] holds one [`Entity`] per code file and the typed,
//! weighted edges between them. Whatever the source (canonical JSON, a
//! Depends export, or the built-in scanner), graphs are normalized the same
//! way:
//!
//! - entity ids are assigned in lexicographic path order,
//! - self-edges are dropped,
//! - duplicate `(src, dst, kind)` edges are merged by summing weights.
//!
//! The aggregated adjacency sums edge weights over kinds, optionally scaled
//! by a per-kind weight table.

mod scan;

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseVector;

pub use scan::{scan_sources, scan_sources_with, LanguageProfile};

pub const CANONICAL_SCHEMA: &str = "pairsmell-depgraph/1";

/// A single code file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: usize,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyEdge {
    pub src: usize,
    pub dst: usize,
    pub kind: String,
    pub weight: u64,
}

/// An edge as read from some input, before normalization. `src` and `dst`
/// index the input path list.
#[derive(Debug, Clone)]
pub struct RawEdge {
    pub src: usize,
    pub dst: usize,
    pub kind: String,
    pub weight: u64,
}

/// Include/exclude filter over entity paths.
#[derive(Debug, Clone, Default)]
pub struct PathFilter {
    include: Option<GlobSet>,
    exclude: Option<GlobSet>,
}

impl PathFilter {
    pub fn new(include: &[String], exclude: &[String]) -> Result<Self> {
        Ok(Self {
            include: build_globset(include)?,
            exclude: build_globset(exclude)?,
        })
    }

    pub fn accepts(&self, path: &str) -> bool {
        if let Some(inc) = &self.include {
            if !inc.is_match(path) {
                return false;
            }
        }
        !self.exclude.as_ref().is_some_and(|exc| exc.is_match(path))
    }
}

fn build_globset(patterns: &[String]) -> Result<Option<GlobSet>> {
    if patterns.is_empty() {
        return Ok(None);
    }
    let mut builder = GlobSetBuilder::new();
    for p in patterns {
        let glob = Glob::new(p).map_err(|e| Error::Parameter(format!("bad glob {p:?}: {e}")))?;
        builder.add(glob);
    }
    builder
        .build()
        .map(Some)
        .map_err(|e| Error::Parameter(e.to_string()))
}

/// Options applied while building a graph from any source.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Multiplier per dependency kind when aggregating adjacency. Kinds not
    /// listed weigh 1.
    pub kind_weights: BTreeMap<String, f64>,
    pub filter: PathFilter,
}

impl LoadOptions {
    fn kind_weight(&self, kind: &str) -> f64 {
        self.kind_weights.get(kind).copied().unwrap_or(1.0)
    }
}

/// An immutable, normalized dependency graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyGraph {
    entities: Vec<Entity>,
    edges: Vec<DependencyEdge>,
    outgoing: Vec<Vec<(usize, f64)>>,
    incoming: Vec<Vec<(usize, f64)>>,
}

impl DependencyGraph {
    /// Builds a graph with default options. See [`DependencyGraph::build`].
    pub fn new(paths: Vec<String>, edges: Vec<RawEdge>) -> Result<Self> {
        Self::build(paths, edges, &LoadOptions::default())
    }

    /// Validates and normalizes `paths` and `edges` into a graph.
    ///
    /// Edge endpoints index `paths`. Paths are normalized and must be unique;
    /// edges to entities removed by the filter are dropped along with them.
    pub fn build(paths: Vec<String>, edges: Vec<RawEdge>, opts: &LoadOptions) -> Result<Self> {
        let mut normalized = Vec::with_capacity(paths.len());
        for p in &paths {
            normalized.push(normalize_path(p)?);
        }
        for (k, e) in edges.iter().enumerate() {
            for end in [e.src, e.dst] {
                if end >= paths.len() {
                    return Err(Error::Validation(format!(
                        "edge #{k} ({} -> {}, {:?}) references unknown entity {end}",
                        e.src, e.dst, e.kind
                    )));
                }
            }
            if e.weight == 0 {
                return Err(Error::Validation(format!(
                    "edge #{k} ({} -> {}, {:?}) has weight 0",
                    e.src, e.dst, e.kind
                )));
            }
        }

        let mut order: Vec<usize> = (0..normalized.len())
            .filter(|&i| opts.filter.accepts(&normalized[i]))
            .collect();
        order.sort_by(|&a, &b| normalized[a].cmp(&normalized[b]));
        for w in order.windows(2) {
            if normalized[w[0]] == normalized[w[1]] {
                return Err(Error::Validation(format!(
                    "duplicate entity path {:?}",
                    normalized[w[0]]
                )));
            }
        }

        let mut new_id = vec![usize::MAX; normalized.len()];
        for (id, &old) in order.iter().enumerate() {
            new_id[old] = id;
        }
        let entities: Vec<Entity> = order
            .iter()
            .enumerate()
            .map(|(id, &old)| Entity {
                id,
                path: normalized[old].clone(),
            })
            .collect();

        let mut merged: BTreeMap<(usize, usize, String), u64> = BTreeMap::new();
        for e in edges {
            let (src, dst) = (new_id[e.src], new_id[e.dst]);
            if src == usize::MAX || dst == usize::MAX || src == dst {
                continue;
            }
            *merged.entry((src, dst, e.kind)).or_insert(0) += e.weight;
        }
        let edges: Vec<DependencyEdge> = merged
            .into_iter()
            .map(|((src, dst, kind), weight)| DependencyEdge {
                src,
                dst,
                kind,
                weight,
            })
            .collect();

        let n = entities.len();
        let mut out_maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for e in &edges {
            let w = e.weight as f64 * opts.kind_weight(&e.kind);
            if w > 0.0 {
                *out_maps[e.src].entry(e.dst).or_insert(0.0) += w;
            }
        }
        let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let outgoing: Vec<Vec<(usize, f64)>> = out_maps
            .into_iter()
            .enumerate()
            .map(|(src, row)| {
                for (&dst, &w) in &row {
                    incoming[dst].push((src, w));
                }
                row.into_iter().collect()
            })
            .collect();

        Ok(Self {
            entities,
            edges,
            outgoing,
            incoming,
        })
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn edges(&self) -> &[DependencyEdge] {
        &self.edges
    }

    pub fn path(&self, id: usize) -> &str {
        &self.entities[id].path
    }

    pub fn index_of(&self, path: &str) -> Option<usize> {
        self.entities
            .binary_search_by(|e| e.path.as_str().cmp(path))
            .ok()
    }

    /// Aggregated weight of `src -> dst`.
    pub fn weight(&self, src: usize, dst: usize) -> f64 {
        let row = &self.outgoing[src];
        row.binary_search_by_key(&dst, |&(d, _)| d)
            .map(|i| row[i].1)
            .unwrap_or(0.0)
    }

    /// Aggregated outgoing weights of `id`, sorted by target.
    pub fn outgoing(&self, id: usize) -> &[(usize, f64)] {
        &self.outgoing[id]
    }

    /// Aggregated incoming weights of `id`, sorted by source.
    pub fn incoming(&self, id: usize) -> &[(usize, f64)] {
        &self.incoming[id]
    }

    /// Every entity adjacent to `id` in either direction, ascending.
    pub fn neighbors(&self, id: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.outgoing[id]
            .iter()
            .chain(&self.incoming[id])
            .map(|&(j, _)| j)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks that the graph can feed the detection pipeline.
    pub fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyGraph("dependency graph has no entities".into()))
        } else {
            Ok(())
        }
    }
}

/// Normalizes a repository-relative path: `/` separators, no `.` segments,
/// no repeated separators. Rejects empty, absolute, and `..` paths.
pub fn normalize_path(path: &str) -> Result<String> {
    let unified = path.replace('\\', "/");
    if unified.starts_with('/') {
        return Err(Error::Validation(format!("absolute path {path:?}")));
    }
    let mut segments = Vec::new();
    for seg in unified.split('/') {
        match seg {
            "" | "." => {}
            ".." => return Err(Error::Validation(format!("path {path:?} contains '..'"))),
            s => segments.push(s),
        }
    }
    if segments.is_empty() {
        return Err(Error::Validation(format!("empty path {path:?}")));
    }
    Ok(segments.join("/"))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonicalDoc {
    schema: String,
    entities: Vec<Entity>,
    edges: Vec<DependencyEdge>,
}

pub fn load_canonical(reader: impl Read) -> Result<DependencyGraph> {
    load_canonical_with(reader, &LoadOptions::default())
}

/// Reads a graph in the canonical `pairsmell-depgraph/1` layout.
pub fn load_canonical_with(mut reader: impl Read, opts: &LoadOptions) -> Result<DependencyGraph> {
    let text = read_all(&mut reader)?;
    let doc: CanonicalDoc = serde_json::from_str(&text).map_err(|e| Error::json(&text, &e))?;
    if doc.schema != CANONICAL_SCHEMA {
        return Err(Error::Format(format!(
            "unsupported schema {:?}, expected {CANONICAL_SCHEMA:?}",
            doc.schema
        )));
    }
    let mut position: HashMap<usize, usize> = HashMap::with_capacity(doc.entities.len());
    for (pos, e) in doc.entities.iter().enumerate() {
        if position.insert(e.id, pos).is_some() {
            return Err(Error::Validation(format!("duplicate entity id {}", e.id)));
        }
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (k, e) in doc.edges.into_iter().enumerate() {
        let lookup = |id: usize| {
            position.get(&id).copied().ok_or_else(|| {
                Error::Validation(format!(
                    "edge #{k} ({} -> {}, {:?}) references unknown entity id {id}",
                    e.src, e.dst, e.kind
                ))
            })
        };
        let (src, dst) = (lookup(e.src)?, lookup(e.dst)?);
        edges.push(RawEdge {
            src,
            dst,
            kind: e.kind,
            weight: e.weight,
        });
    }
    let paths = doc.entities.into_iter().map(|e| e.path).collect();
    DependencyGraph::build(paths, edges, opts)
}

/// Serializes a graph in the canonical layout. Ids equal array positions.
pub fn export_canonical(graph: &DependencyGraph) -> String {
    let doc = CanonicalDoc {
        schema: CANONICAL_SCHEMA.to_string(),
        entities: graph.entities.clone(),
        edges: graph.edges.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail")
}

#[derive(Deserialize)]
struct DependsDoc {
    variables: Vec<String>,
    cells: Vec<DependsCell>,
}

#[derive(Deserialize)]
struct DependsCell {
    src: usize,
    dest: usize,
    #[serde(default)]
    values: BTreeMap<String, f64>,
}

pub fn load_depends_json(reader: impl Read) -> Result<DependencyGraph> {
    load_depends_json_with(reader, &LoadOptions::default())
}

/// Reads a Depends-style export (`variables` + `cells`).
///
/// Absolute paths are made relative by stripping the directory prefix they
/// all share.
pub fn load_depends_json_with(mut reader: impl Read, opts: &LoadOptions) -> Result<DependencyGraph> {
    let text = read_all(&mut reader)?;
    let doc: DependsDoc = serde_json::from_str(&text).map_err(|e| Error::json(&text, &e))?;
    let n = doc.variables.len();
    let mut edges = Vec::new();
    for (k, cell) in doc.cells.iter().enumerate() {
        if cell.src >= n || cell.dest >= n {
            return Err(Error::Validation(format!(
                "cell #{k} ({} -> {}) is out of range for {n} variables",
                cell.src, cell.dest
            )));
        }
        for (kind, &count) in &cell.values {
            if !count.is_finite() || count < 0.0 || count.fract() != 0.0 {
                return Err(Error::Format(format!(
                    "cell #{k} has non-integral count {count} for kind {kind:?}"
                )));
            }
            if count == 0.0 {
                continue;
            }
            edges.push(RawEdge {
                src: cell.src,
                dst: cell.dest,
                kind: kind.clone(),
                weight: count as u64,
            });
        }
    }
    let paths = relativize(doc.variables);
    DependencyGraph::build(paths, edges, opts)
}

fn relativize(paths: Vec<String>) -> Vec<String> {
    let unified: Vec<String> = paths.iter().map(|p| p.replace('\\', "/")).collect();
    let is_abs = |p: &str| p.starts_with('/') || p.as_bytes().get(1) == Some(&b':');
    if unified.is_empty() || !unified.iter().all(|p| is_abs(p)) {
        return paths;
    }
    let dirs: Vec<Vec<&str>> = unified
        .iter()
        .map(|p| {
            let mut segs: Vec<&str> = p.split('/').collect();
            segs.pop();
            segs
        })
        .collect();
    let mut common = dirs[0].len();
    for d in &dirs[1..] {
        common = common.min(d.iter().zip(&dirs[0]).take_while(|(a, b)| a == b).count());
    }
    unified
        .iter()
        .map(|p| p.split('/').skip(common).collect::<Vec<_>>().join("/"))
        .collect()
}

/// Per-entity feature vectors over `2n` dimensions: `0..n` hold outgoing
/// aggregated weights, `n..2n` hold incoming ones.
pub fn feature_vectors(graph: &DependencyGraph) -> Vec<SparseVector> {
    let n = graph.len();
    (0..n)
        .map(|i| {
            SparseVector::from_pairs(
                graph
                    .outgoing(i)
                    .iter()
                    .map(|&(j, w)| (j, w))
                    .chain(graph.incoming(i).iter().map(|&(j, w)| (n + j, w))),
            )
        })
        .collect()
}

fn read_all(reader: &mut impl Read) -> Result<String> {
    let mut buf = Vec::new();
    reader
        .read_to_end(&mut buf)
        .map_err(|e| Error::io("<input stream>", e))?;
    String::from_utf8(buf).map_err(|e| Error::Format(format!("input is not UTF-8: {e}")))
}
