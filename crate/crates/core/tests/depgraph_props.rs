mod common;

use common::{arb_graph, paths};
use pairsmell::depgraph::{export_canonical, load_canonical, DependencyGraph, RawEdge};
use proptest::prelude::*;

fn weighted(n: usize, folders: usize, edges: &[(usize, usize)]) -> (Vec<String>, Vec<RawEdge>) {
    let raw = edges
        .iter()
        .enumerate()
        .map(|(k, &(src, dst))| RawEdge {
            src,
            dst,
            kind: if k % 3 == 0 { "call".into() } else { "import".into() },
            weight: 1 + (k % 4) as u64,
        })
        .collect();
    (paths(n, folders), raw)
}

proptest! {
    #[test]
    fn canonical_round_trip((n, folders, edges) in arb_graph(10)) {
        let (ps, raw) = weighted(n, folders, &edges);
        let g = DependencyGraph::new(ps, raw).unwrap();
        let text = export_canonical(&g);
        let back = load_canonical(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(export_canonical(&back), text);
    }

    #[test]
    fn adjacency_is_sum_of_kept_edges((n, folders, edges) in arb_graph(10)) {
        let (ps, raw) = weighted(n, folders, &edges);
        let g = DependencyGraph::new(ps.clone(), raw.clone()).unwrap();
        for i in 0..n {
            for j in 0..n {
                let (pi, pj) = (g.path(i), g.path(j));
                let want: u64 = if i == j {
                    0
                } else {
                    raw.iter()
                        .filter(|e| ps[e.src] == pi && ps[e.dst] == pj)
                        .map(|e| e.weight)
                        .sum()
                };
                prop_assert_eq!(g.weight(i, j), want as f64);
            }
        }
    }

    #[test]
    fn ids_follow_path_order((n, folders, edges) in arb_graph(10)) {
        let (mut ps, raw) = weighted(n, folders, &edges);
        ps.reverse();
        let raw: Vec<RawEdge> = raw.into_iter().map(|e| RawEdge { src: n - 1 - e.src, dst: n - 1 - e.dst, ..e }).collect();
        let g = DependencyGraph::new(ps, raw).unwrap();
        prop_assert!(g.entities().windows(2).all(|w| w[0].path < w[1].path));
        prop_assert!(g.entities().iter().enumerate().all(|(i, e)| e.id == i));
    }
}
