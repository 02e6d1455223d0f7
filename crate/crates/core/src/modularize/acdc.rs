//! Pattern-driven clustering in three passes: body-header pairing,
//! subgraph dominators, then orphan adoption.

use std::collections::BTreeMap;

use super::ModularSolution;
use crate::depgraph::DependencyGraph;

pub const DEFAULT_MAX_CLUSTER_SIZE: usize = 20;

const HEADER_EXTS: [&str; 2] = ["h", "hpp"];
const BODY_EXTS: [&str; 3] = ["c", "cc", "cpp"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcdcConfig {
    /// Upper bound on modules emitted by the dominator pass.
    pub max_cluster_size: usize,
}

impl Default for AcdcConfig {
    fn default() -> Self {
        Self {
            max_cluster_size: DEFAULT_MAX_CLUSTER_SIZE,
        }
    }
}

/// Splits a path into `(directory, stem, extension)`.
pub(crate) fn split_path(path: &str) -> (&str, &str, &str) {
    let (dir, base) = path.rsplit_once('/').unwrap_or(("", path));
    let (stem, ext) = base.rsplit_once('.').unwrap_or((base, ""));
    (dir, stem, ext)
}

pub(crate) fn is_header(ext: &str) -> bool {
    HEADER_EXTS.contains(&ext)
}

pub(crate) fn is_body(ext: &str) -> bool {
    BODY_EXTS.contains(&ext)
}

struct Modules {
    of: Vec<Option<usize>>,
    members: Vec<Vec<usize>>,
    dominator_sizes: Vec<usize>,
}

impl Modules {
    fn push(&mut self, members: Vec<usize>) {
        let id = self.members.len();
        for &e in &members {
            self.of[e] = Some(id);
        }
        self.members.push(members);
    }
}

/// Clusters `graph` without a target module count.
pub fn acdc(graph: &DependencyGraph, config: &AcdcConfig) -> ModularSolution {
    run(graph, config).0
}

// Also returns the sizes of the modules emitted by the dominator pass.
fn run(graph: &DependencyGraph, config: &AcdcConfig) -> (ModularSolution, Vec<usize>) {
    let n = graph.len();
    let mut modules = Modules {
        of: vec![None; n],
        members: Vec::new(),
        dominator_sizes: Vec::new(),
    };

    // Pass 1: a body and its header in the same directory.
    let mut groups: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for e in graph.entities() {
        let (dir, stem, ext) = split_path(&e.path);
        if is_header(ext) || is_body(ext) {
            groups.entry((dir, stem)).or_default().push(e.id);
        }
    }
    let mut paired: Vec<Vec<usize>> = groups
        .into_values()
        .filter(|ids| {
            let ext = |&i: &usize| split_path(graph.path(i)).2;
            ids.iter().any(|i| is_header(ext(i))) && ids.iter().any(|i| is_body(ext(i)))
        })
        .collect();
    paired.sort();
    for ids in paired {
        modules.push(ids);
    }

    // Pass 2: d together with the neighbours it dominates, i.e. the largest
    // subset S of its unassigned neighbours whose incoming edges all start
    // in {d} ∪ S.
    for d in 0..n {
        if modules.of[d].is_some() {
            continue;
        }
        let mut inside = vec![false; n];
        inside[d] = true;
        let mut dominated: Vec<usize> = graph
            .neighbors(d)
            .into_iter()
            .filter(|&s| modules.of[s].is_none())
            .collect();
        for &s in &dominated {
            inside[s] = true;
        }
        loop {
            let before = dominated.len();
            dominated.retain(|&s| {
                let keep = graph.incoming(s).iter().all(|&(src, _)| inside[src]);
                if !keep {
                    inside[s] = false;
                }
                keep
            });
            if dominated.len() == before {
                break;
            }
        }
        let size = dominated.len() + 1;
        if size >= 2 && size <= config.max_cluster_size {
            let mut members = dominated;
            members.push(d);
            members.sort_unstable();
            modules.dominator_sizes.push(members.len());
            modules.push(members);
        }
    }

    // Pass 3: orphans join the module they are most connected to.
    for e in 0..n {
        if modules.of[e].is_some() {
            continue;
        }
        let mut weight_to: BTreeMap<usize, f64> = BTreeMap::new();
        for &(j, w) in graph.outgoing(e).iter().chain(graph.incoming(e)) {
            if let Some(m) = modules.of[j] {
                *weight_to.entry(m).or_insert(0.0) += w;
            }
        }
        let best = weight_to
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .max_by(|&(ma, wa), &(mb, wb)| {
                wa.total_cmp(&wb)
                    .then(modules.members[ma].len().cmp(&modules.members[mb].len()))
                    .then(mb.cmp(&ma))
            });
        match best {
            Some((m, _)) => {
                modules.members[m].push(e);
                modules.of[e] = Some(m);
            }
            None => modules.push(vec![e]),
        }
    }

    let labels: Vec<usize> = modules.of.iter().map(|m| m.expect("every entity placed")).collect();
    (ModularSolution::from_labels(&labels, "acdc"), modules.dominator_sizes)
}

#[cfg(test)]
mod tests {
    use super::super::test_graphs::*;
    use super::*;
    use crate::depgraph::RawEdge;

    fn named(paths: &[&str], edges: &[(usize, usize)]) -> DependencyGraph {
        let edges = edges
            .iter()
            .map(|&(src, dst)| RawEdge {
                src,
                dst,
                kind: "dep".into(),
                weight: 1,
            })
            .collect();
        DependencyGraph::new(paths.iter().map(|p| p.to_string()).collect(), edges).unwrap()
    }

    #[test]
    fn body_header_pair() {
        let g = named(&["src/m.c", "src/m.h"], &[]);
        let s = acdc(&g, &AcdcConfig::default());
        assert_eq!(s.modules(), vec![vec![0, 1]]);
    }

    #[test]
    fn body_header_needs_same_dir() {
        let g = named(&["inc/m.h", "src/m.c"], &[]);
        assert_eq!(acdc(&g, &AcdcConfig::default()).module_count(), 2);
    }

    #[test]
    fn star_into_hub() {
        // Leaves sort before and after the hub to exercise both orders.
        let g = named(&["a.java", "d.java", "x.java", "y.java"], &[(0, 1), (2, 1), (3, 1)]);
        let s = acdc(&g, &AcdcConfig::default());
        assert_eq!(s.modules(), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn isolated_is_singleton() {
        let g = graph(3, &[(0, 1)]);
        let s = acdc(&g, &AcdcConfig::default());
        assert_eq!(s.modules(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn separates_bridged_cliques() {
        let s = acdc(&two_cliques(6), &AcdcConfig::default());
        assert_eq!(s.modules(), vec![(0..6).collect::<Vec<_>>(), (6..12).collect()]);
    }

    #[test]
    fn dominator_respects_size_cap() {
        // Hub 0 with five leaves: too big for a cap of 4, so the pass falls
        // back to {0, 1} and the other leaves are adopted.
        let g = graph(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]);
        let (s, sizes) = run(&g, &AcdcConfig { max_cluster_size: 4 });
        assert_eq!(sizes, vec![2]);
        assert_eq!(s.module_count(), 1);
        let (_, sizes) = run(&g, &AcdcConfig::default());
        assert_eq!(sizes, vec![6]);
    }

    #[test]
    fn dominator_sizes_never_exceed_cap() {
        let g = two_cliques(6);
        for cap in 1..=13 {
            let (s, sizes) = run(&g, &AcdcConfig { max_cluster_size: cap });
            assert!(sizes.iter().all(|&z| z <= cap), "cap {cap}: {sizes:?}");
            assert_eq!(s.len(), 12);
        }
    }

    #[test]
    fn orphan_prefers_heavier_module() {
        let g = named(&["a.c", "a.h", "b.c", "b.h", "z.java"], &[(4, 0), (4, 2), (4, 3)]);
        let s = acdc(&g, &AcdcConfig::default());
        assert_eq!(s.modules(), vec![vec![0, 1], vec![2, 3, 4]]);
    }

    #[test]
    fn orphan_tie_goes_to_lower_module() {
        let g = named(&["a.c", "a.h", "b.c", "b.h", "z.java"], &[(4, 0), (4, 2)]);
        let s = acdc(&g, &AcdcConfig::default());
        assert_eq!(s.modules(), vec![vec![0, 1, 4], vec![2, 3]]);
    }
}
