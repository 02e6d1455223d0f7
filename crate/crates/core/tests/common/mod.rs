#![allow(dead_code)]

use pairsmell::depgraph::{DependencyGraph, RawEdge};
use proptest::prelude::*;

pub fn edge(src: usize, dst: usize) -> RawEdge {
    RawEdge {
        src,
        dst,
        kind: "dep".into(),
        weight: 1,
    }
}

/// Graph over `paths` with unit-weight edges.
pub fn graph_with_paths(paths: &[String], edges: &[(usize, usize)]) -> DependencyGraph {
    let edges = edges.iter().map(|&(s, d)| edge(s, d)).collect();
    DependencyGraph::new(paths.to_vec(), edges).unwrap()
}

/// `n` files spread over `folders` folders.
pub fn paths(n: usize, folders: usize) -> Vec<String> {
    (0..n).map(|i| format!("m{}/f{i:02}.java", i % folders.max(1))).collect()
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> DependencyGraph {
    graph_with_paths(&paths(n, 1), edges)
}

/// Random graph: `(n, folders, edges)`.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = (usize, usize, Vec<(usize, usize)>)> {
    (2..=max_n, 1..=3usize).prop_flat_map(|(n, folders)| {
        let edges = prop::collection::vec((0..n, 0..n), 0..=n * 3);
        (Just(n), Just(folders), edges)
    })
}

/// Every set partition of `0..n` as label vectors (restricted growth strings).
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for l in 0..=max + 1 {
            cur.push(l);
            rec(i + 1, n, cur, max.max(l), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = vec![0];
    rec(1, n, &mut cur, 0, &mut out);
    out
}

/// Checks that `assignment` is a total partition with canonical numbering:
/// module ids appear in order of their smallest member.
pub fn assert_canonical(assignment: &[usize], module_count: usize) {
    let mut next = 0;
    for &m in assignment {
        assert!(m <= next, "module {m} appears before {next}");
        if m == next {
            next += 1;
        }
    }
    assert_eq!(next, module_count);
}
