//! Agglomerative information-bottleneck clustering.
//!
//! A cluster `c` carries its weight `p(c) = |c| / n` and the conditional
//! feature distribution `P(f|c)`, the normalized sum of its members'
//! feature vectors (uniform when that sum is zero). Merging `ci` and `cj`
//! loses `(p(ci) + p(cj)) * JS_pi(P(f|ci), P(f|cj))` bits, with the
//! Jensen-Shannon mixture weighted by `p(ci)` and `p(cj)`.

use super::agglomerate::{self, Policy};
use super::{check_k, ModularSolution};
use crate::depgraph::{feature_vectors, DependencyGraph};
use crate::error::Result;
use crate::sparse::SparseVector;

// Costs closer than this are ties.
const COST_EPS: f64 = 1e-12;

#[derive(Clone, Copy)]
enum Dist<'a> {
    /// Unnormalized mass and its total.
    Sparse(&'a SparseVector, f64),
    Uniform,
}

impl<'a> Dist<'a> {
    fn of(v: &'a SparseVector) -> Self {
        if v.is_zero() {
            Dist::Uniform
        } else {
            Dist::Sparse(v, v.total())
        }
    }
}

fn kl_term(weight: f64, p: f64, m: f64) -> f64 {
    if p > 0.0 {
        weight * p * (p / m).log2()
    } else {
        0.0
    }
}

/// Weighted Jensen-Shannon divergence over `dims` dimensions.
fn js_divergence(pi1: f64, p: Dist<'_>, pi2: f64, q: Dist<'_>, dims: usize) -> f64 {
    let uniform = 1.0 / dims as f64;
    let pair = |a: f64, b: f64| {
        if a == b {
            return 0.0;
        }
        let m = pi1 * a + pi2 * b;
        kl_term(pi1, a, m) + kl_term(pi2, b, m)
    };
    match (p, q) {
        (Dist::Uniform, Dist::Uniform) => 0.0,
        (Dist::Sparse(v, tv), Dist::Uniform) | (Dist::Uniform, Dist::Sparse(v, tv)) => {
            let (pi_s, pi_u) = if matches!(p, Dist::Sparse(..)) { (pi1, pi2) } else { (pi2, pi1) };
            let explicit: f64 = v
                .iter()
                .map(|(_, x)| {
                    let a = x / tv;
                    let m = pi_s * a + pi_u * uniform;
                    kl_term(pi_s, a, m) + kl_term(pi_u, uniform, m)
                })
                .sum();
            // Dimensions outside the sparse support: only the uniform side
            // has mass there.
            let rest = (dims - v.support_len()) as f64;
            explicit + pi_u * rest * uniform * (1.0 / pi_u).log2()
        }
        (Dist::Sparse(v, tv), Dist::Sparse(w, tw)) => {
            let (mut i, mut j) = (v.iter().peekable(), w.iter().peekable());
            let mut total = 0.0;
            loop {
                match (i.peek().copied(), j.peek().copied()) {
                    (Some((da, xa)), Some((db, xb))) => {
                        if da == db {
                            total += pair(xa / tv, xb / tw);
                            i.next();
                            j.next();
                        } else if da < db {
                            total += pair(xa / tv, 0.0);
                            i.next();
                        } else {
                            total += pair(0.0, xb / tw);
                            j.next();
                        }
                    }
                    (Some((_, xa)), None) => {
                        total += pair(xa / tv, 0.0);
                        i.next();
                    }
                    (None, Some((_, xb))) => {
                        total += pair(0.0, xb / tw);
                        j.next();
                    }
                    (None, None) => break,
                }
            }
            total
        }
    }
}

/// Information lost by merging two clusters of the given sizes and summed
/// feature vectors, out of `n` entities in a `dims`-dimensional space.
pub fn limbo_merge_cost(
    size_a: usize,
    vec_a: &SparseVector,
    size_b: usize,
    vec_b: &SparseVector,
    n: usize,
    dims: usize,
) -> f64 {
    let pa = size_a as f64 / n as f64;
    let pb = size_b as f64 / n as f64;
    let w = pa + pb;
    let cost = w * js_divergence(pa / w, Dist::of(vec_a), pb / w, Dist::of(vec_b), dims);
    cost.max(0.0)
}

struct InfoLoss {
    n: usize,
    dims: usize,
    vectors: Vec<SparseVector>,
    members: Vec<Vec<usize>>,
}

impl Policy for InfoLoss {
    type Score = f64;

    fn score(&self, a: usize, b: usize) -> Option<f64> {
        Some(limbo_merge_cost(
            self.members[a].len(),
            &self.vectors[a],
            self.members[b].len(),
            &self.vectors[b],
            self.n,
            self.dims,
        ))
    }

    fn better(&self, x: &f64, y: &f64) -> bool {
        *x < *y - COST_EPS
    }

    fn merge(&mut self, a: usize, b: usize) {
        let moved = std::mem::take(&mut self.members[b]);
        self.members[a].extend(moved);
        let vb = std::mem::take(&mut self.vectors[b]);
        self.vectors[a] = self.vectors[a].add(&vb);
    }
}

/// Agglomerates entities into exactly `k` modules, always merging the pair
/// that loses the least information about the feature space.
pub fn limbo(graph: &DependencyGraph, k: usize) -> Result<ModularSolution> {
    let n = graph.len();
    check_k(n, k)?;
    let mut policy = InfoLoss {
        n,
        dims: 2 * n,
        vectors: feature_vectors(graph),
        members: (0..n).map(|i| vec![i]).collect(),
    };
    let agg = agglomerate::run(&mut policy, n, |clusters| clusters <= k);
    Ok(ModularSolution::from_labels(&agg.labels(&policy.members), "limbo"))
}
