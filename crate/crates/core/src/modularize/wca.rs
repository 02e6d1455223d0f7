//! Weighted combined agglomeration with the unbiased-Ellenberg (NM)
//! similarity, in its support-count form.

use super::agglomerate::{self, Policy};
use super::{check_k, ModularSolution};
use crate::depgraph::{feature_vectors, DependencyGraph};
use crate::error::Result;
use crate::sparse::SparseVector;

/// UENM similarity as an exact ratio `(numerator, denominator)` of
/// `M / (M + 2b + 2c)`, which equals `½M / (½M + b + c)`.
fn uenm_ratio(x: &SparseVector, y: &SparseVector) -> (u64, u64) {
    let (m, b, c) = x.support_overlap(y);
    let den = (m + 2 * (b + c)) as u64;
    if den == 0 {
        (0, 1)
    } else {
        (m as u64, den)
    }
}

/// Similarity of two non-negative feature vectors, in `[0, 1]`.
///
/// With `M` features present in both, `b` only in `x` and `c` only in `y`,
/// this is `½M / (½M + b + c)`; joint absences are ignored. Two all-zero
/// vectors have similarity 0.
pub fn uenm_similarity(x: &SparseVector, y: &SparseVector) -> f64 {
    let (num, den) = uenm_ratio(x, y);
    num as f64 / den as f64
}

struct Uenm {
    vectors: Vec<SparseVector>,
    members: Vec<Vec<usize>>,
}

impl Policy for Uenm {
    type Score = (u64, u64);

    fn score(&self, a: usize, b: usize) -> Option<Self::Score> {
        Some(uenm_ratio(&self.vectors[a], &self.vectors[b]))
    }

    fn better(&self, x: &Self::Score, y: &Self::Score) -> bool {
        (x.0 as u128) * (y.1 as u128) > (y.0 as u128) * (x.1 as u128)
    }

    fn merge(&mut self, a: usize, b: usize) {
        let moved = std::mem::take(&mut self.members[b]);
        self.members[a].extend(moved);
        let vb = std::mem::take(&mut self.vectors[b]);
        self.vectors[a] = self.vectors[a].add(&vb);
    }
}

/// Agglomerates entities into exactly `k` modules, always merging the pair
/// of clusters whose summed feature vectors are most similar.
pub fn wca(graph: &DependencyGraph, k: usize) -> Result<ModularSolution> {
    let n = graph.len();
    check_k(n, k)?;
    let mut policy = Uenm {
        vectors: feature_vectors(graph),
        members: (0..n).map(|i| vec![i]).collect(),
    };
    let agg = agglomerate::run(&mut policy, n, |clusters| clusters <= k);
    Ok(ModularSolution::from_labels(&agg.labels(&policy.members), "wca"))
}

#[cfg(test)]
mod tests {
    use super::super::test_graphs::*;
    use super::*;

    fn v(dims: &[usize]) -> SparseVector {
        SparseVector::from_pairs(dims.iter().map(|&d| (d, 1.0)))
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(uenm_similarity(&v(&[1, 2, 3, 4]), &v(&[1, 2, 3, 4])), 1.0);
        assert_eq!(uenm_similarity(&v(&[1, 2]), &v(&[3, 4])), 0.0);
        assert!((uenm_similarity(&v(&[1, 2]), &v(&[2, 3])) - 0.2).abs() < 1e-15);
        assert_eq!(uenm_similarity(&v(&[]), &v(&[])), 0.0);
    }

    #[test]
    fn similarity_ignores_magnitudes() {
        let a = SparseVector::from_pairs([(1, 5.0), (2, 0.5)]);
        assert_eq!(uenm_similarity(&a, &v(&[1, 2])), 1.0);
    }

    #[test]
    fn trivial_cuts() {
        let g = graph(1, &[]);
        assert_eq!(wca(&g, 1).unwrap().module_count(), 1);
        let g = two_cliques(3);
        let s = wca(&g, 6).unwrap();
        assert_eq!(s.module_count(), 6);
        assert!(wca(&g, 0).is_err());
        assert!(wca(&g, 7).is_err());
    }

    #[test]
    fn recovers_two_cliques() {
        let s = wca(&two_cliques(3), 2).unwrap();
        assert_eq!(s.modules(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn zero_similarity_ties_go_to_smallest_ids() {
        let g = graph(4, &[]);
        let s = wca(&g, 2).unwrap();
        // (0,1) merges first, then ({0,1},2).
        assert_eq!(s.modules(), vec![vec![0, 1, 2], vec![3]]);
    }
}
