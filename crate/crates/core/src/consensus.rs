//! Co-association of modular solutions and apt modular relations.
//!
//! For `m` solutions the co-association value of a pair is the fraction of
//! solutions that put both entities in the same module:
//!
//! ```text
//! apt(i, j) = (1/m) * Σ_k MR_k(i, j)
//! ```
//!
//! A pair is *apt collocated* when every solution collocates it and *apt
//! separated* when every solution separates it; anything in between carries
//! no apt relation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modularize::ModularSolution;

/// Modular relation of `i` and `j` in `solution`: 1 if collocated, else 0.
pub fn mr_of(solution: &ModularSolution, i: usize, j: usize) -> Result<u8> {
    if i == j {
        return Err(Error::Parameter(format!(
            "modular relation of entity {i} with itself is undefined"
        )));
    }
    let n = solution.len();
    if i >= n || j >= n {
        return Err(Error::Parameter(format!("pair ({i}, {j}) out of range for n={n}")));
    }
    Ok(u8::from(solution.module_of(i) == solution.module_of(j)))
}

/// Position of unordered pair `(i, j)`, `i < j`, in an upper-triangular
/// layout without diagonal.
#[inline]
pub(crate) fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Iterates unordered pairs `(i, j)`, `i < j`, in triangular order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Symmetric matrix of collocation vote counts, stored triangularly with
/// one byte per pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoAssociationMatrix {
    n: usize,
    m: usize,
    votes: Vec<u8>,
}

impl CoAssociationMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of solutions collocating `i` and `j`; `m` on the diagonal.
    pub fn votes(&self, i: usize, j: usize) -> usize {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.m,
            std::cmp::Ordering::Less => self.votes[tri_index(self.n, i, j)] as usize,
            std::cmp::Ordering::Greater => self.votes[tri_index(self.n, j, i)] as usize,
        }
    }

    /// Co-association value in `{0, 1/m, ..., 1}`; 1 on the diagonal.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.votes(i, j) as f64 / self.m as f64
    }

    /// CSV `i,j,apt` rows. Only pairs at 0 or 1 unless `full` is set.
    pub fn to_csv(&self, full: bool) -> String {
        let mut out = String::from("i,j,apt\n");
        for (i, j) in pairs(self.n) {
            let v = self.votes(i, j);
            if full || v == 0 || v == self.m {
                writeln!(out, "{i},{j},{:.4}", self.value(i, j)).unwrap();
            }
        }
        out
    }
}

/// Accumulates the co-association matrix of `solutions`.
pub fn build_coassociation(solutions: &[ModularSolution]) -> Result<CoAssociationMatrix> {
    let m = solutions.len();
    if m < 2 {
        return Err(Error::Parameter(format!(
            "consensus needs at least 2 solutions, got {m}"
        )));
    }
    if m > u8::MAX as usize {
        return Err(Error::Parameter(format!("at most 255 solutions supported, got {m}")));
    }
    let n = solutions[0].len();
    if let Some(bad) = solutions.iter().find(|s| s.len() != n) {
        return Err(Error::Validation(format!(
            "solution {:?} covers {} entities, expected {n}",
            bad.tool(),
            bad.len()
        )));
    }
    let mut votes = vec![0u8; n * n.saturating_sub(1) / 2];
    for s in solutions {
        // Only collocated pairs add a vote, so walk each module's members.
        for members in s.modules() {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    votes[tri_index(n, i, j)] += 1;
                }
            }
        }
    }
    Ok(CoAssociationMatrix { n, m, votes })
}

/// Tools whose solution puts every entity in a single module.
pub fn degenerate_tools(solutions: &[ModularSolution]) -> Vec<String> {
    solutions
        .iter()
        .filter(|s| s.len() > 1 && s.module_count() == 1)
        .map(|s| s.tool().to_string())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AptMr {
    AptSeparated,
    AptCollocated,
    NoConsensus,
}

impl AptMr {
    /// The apt relation as 0/1, if there is one.
    pub fn relation(self) -> Option<u8> {
        match self {
            AptMr::AptSeparated => Some(0),
            AptMr::AptCollocated => Some(1),
            AptMr::NoConsensus => None,
        }
    }
}

/// How a co-association value turns into an apt relation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ConsensusMode {
    /// Every solution must agree.
    #[default]
    Unanimity,
    /// Collocated at or above `t`, separated at or below `1 - t`.
    Threshold(f64),
}

impl ConsensusMode {
    pub fn validate(self) -> Result<()> {
        match self {
            ConsensusMode::Threshold(t) if !(t > 0.5 && t <= 1.0) => Err(Error::Parameter(format!(
                "consensus threshold {t} must lie in (0.5, 1]"
            ))),
            _ => Ok(()),
        }
    }
}

/// Apt relation of every unordered pair, read off a co-association matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AptClassification<'a> {
    matrix: &'a CoAssociationMatrix,
    mode: ConsensusMode,
}

impl<'a> AptClassification<'a> {
    pub fn n(&self) -> usize {
        self.matrix.n
    }

    pub fn matrix(&self) -> &'a CoAssociationMatrix {
        self.matrix
    }

    pub fn mode(&self) -> ConsensusMode {
        self.mode
    }

    fn label(&self, votes: usize) -> AptMr {
        let m = self.matrix.m;
        match self.mode {
            ConsensusMode::Unanimity if votes == m => AptMr::AptCollocated,
            ConsensusMode::Unanimity if votes == 0 => AptMr::AptSeparated,
            ConsensusMode::Unanimity => AptMr::NoConsensus,
            ConsensusMode::Threshold(t) => {
                let value = votes as f64 / m as f64;
                if value >= t {
                    AptMr::AptCollocated
                } else if value <= 1.0 - t {
                    AptMr::AptSeparated
                } else {
                    AptMr::NoConsensus
                }
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> AptMr {
        assert!(i != j, "apt relation is undefined on the diagonal");
        self.label(self.matrix.votes(i, j))
    }

    /// `(i, j, apt)` for every unordered pair in triangular order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, AptMr)> + '_ {
        pairs(self.matrix.n)
            .zip(self.matrix.votes.iter())
            .map(|((i, j), &v)| (i, j, self.label(v as usize)))
    }

    pub fn count(&self, label: AptMr) -> usize {
        self.matrix
            .votes
            .iter()
            .filter(|&&v| self.label(v as usize) == label)
            .count()
    }
}

pub fn classify_apt(matrix: &CoAssociationMatrix) -> AptClassification<'_> {
    classify_apt_with(matrix, ConsensusMode::Unanimity)
}

pub fn classify_apt_with(matrix: &CoAssociationMatrix, mode: ConsensusMode) -> AptClassification<'_> {
    AptClassification { matrix, mode }
}
