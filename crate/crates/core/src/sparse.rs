//! Sparse non-negative vectors keyed by feature dimension.

/// A sparse vector with strictly positive entries, kept sorted by dimension.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from arbitrary `(dim, value)` pairs. Duplicate
    /// dimensions are summed; non-positive values are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut entries: Vec<(usize, f64)> = pairs.into_iter().collect();
        entries.sort_by_key(|&(d, _)| d);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for (d, v) in entries {
            match merged.last_mut() {
                Some((ld, lv)) if *ld == d => *lv += v,
                _ => merged.push((d, v)),
            }
        }
        merged.retain(|&(_, v)| v > 0.0);
        Self { entries: merged }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn get(&self, dim: usize) -> f64 {
        self.entries
            .binary_search_by_key(&dim, |&(d, _)| d)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    /// Number of dimensions with non-zero mass.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    /// Elementwise sum.
    pub fn add(&self, other: &SparseVector) -> SparseVector {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        SparseVector { entries: out }
    }

    /// Counts `(shared, only_self, only_other)` support dimensions.
    pub fn support_overlap(&self, other: &SparseVector) -> (usize, usize, usize) {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j, mut shared) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    shared += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        (shared, a.len() - shared, b.len() - shared)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_pairs_merges_and_drops_zero() {
        let v = SparseVector::from_pairs([(3, 1.0), (1, 2.0), (3, 2.0), (5, 0.0)]);
        assert_eq!(v.iter().collect::<Vec<_>>(), vec![(1, 2.0), (3, 3.0)]);
    }

    #[test]
    fn add_and_overlap() {
        let a = SparseVector::from_pairs([(1, 1.0), (2, 1.0)]);
        let b = SparseVector::from_pairs([(2, 2.0), (3, 1.0)]);
        assert_eq!(a.add(&b).iter().collect::<Vec<_>>(), vec![(1, 1.0), (2, 3.0), (3, 1.0)]);
        assert_eq!(a.support_overlap(&b), (1, 1, 1));
    }
}
