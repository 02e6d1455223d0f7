//! Shared pair-selection loop for the agglomerative algorithms.
//!
//! Clusters live in slots indexed by their smallest member id, so the slot
//! pair `(a, b)` with `a < b` is exactly the tie-break key. Each row `c`
//! caches its best partner `p > c`; a merge only invalidates rows that
//! pointed at one of the merged slots.

/// Pair scoring policy.
pub(crate) trait Policy {
    type Score: Copy;

    /// Score of merging slots `a < b`, or `None` when the merge is not
    /// admissible.
    fn score(&self, a: usize, b: usize) -> Option<Self::Score>;

    /// Whether `x` beats `y` outright. Scores that beat each other in
    /// neither direction are ties and fall back to slot order.
    fn better(&self, x: &Self::Score, y: &Self::Score) -> bool;

    /// Merges slot `b` into slot `a`.
    fn merge(&mut self, a: usize, b: usize);
}

pub(crate) struct Agglomerator {
    active: Vec<bool>,
    row_best: Vec<Option<usize>>,
}

impl Agglomerator {
    pub fn new<P: Policy>(n: usize, policy: &P) -> Self {
        let mut this = Self {
            active: vec![true; n],
            row_best: vec![None; n],
        };
        for c in 0..n {
            this.recompute_row(c, policy);
        }
        this
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    fn recompute_row<P: Policy>(&mut self, c: usize, policy: &P) {
        let mut best: Option<(usize, P::Score)> = None;
        for p in c + 1..self.active.len() {
            if !self.active[p] {
                continue;
            }
            if let Some(s) = policy.score(c, p) {
                if best.as_ref().is_none_or(|(_, b)| policy.better(&s, b)) {
                    best = Some((p, s));
                }
            }
        }
        self.row_best[c] = best.map(|(p, _)| p);
    }

    /// Best admissible pair overall, ties resolved to the smallest `(a, b)`.
    pub fn best_pair<P: Policy>(&self, policy: &P) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, P::Score)> = None;
        for (c, &p) in self.row_best.iter().enumerate() {
            let Some(p) = p else { continue };
            if !self.active[c] {
                continue;
            }
            let s = policy.score(c, p).expect("cached pair stays admissible");
            if best.as_ref().is_none_or(|(_, _, b)| policy.better(&s, b)) {
                best = Some((c, p, s));
            }
        }
        best.map(|(a, b, _)| (a, b))
    }

    /// Merges `b` into `a` (`a < b`) and refreshes the affected rows.
    pub fn merge<P: Policy>(&mut self, a: usize, b: usize, policy: &mut P) {
        debug_assert!(a < b && self.active[a] && self.active[b]);
        policy.merge(a, b);
        self.active[b] = false;
        self.row_best[b] = None;
        self.recompute_row(a, policy);
        for c in 0..self.active.len() {
            if !self.active[c] || c == a {
                continue;
            }
            match self.row_best[c] {
                Some(p) if p == a || p == b => self.recompute_row(c, policy),
                current if c < a => {
                    // Only the (c, a) score changed in this row.
                    let Some(s) = policy.score(c, a) else { continue };
                    let replace = match current {
                        None => true,
                        Some(p) => {
                            let sp = policy.score(c, p).expect("cached pair stays admissible");
                            policy.better(&s, &sp) || (!policy.better(&sp, &s) && a < p)
                        }
                    };
                    if replace {
                        self.row_best[c] = Some(a);
                    }
                }
                _ => {}
            }
        }
    }

    /// Slot labels: every entity maps to the slot of its cluster.
    pub fn labels(&self, members: &[Vec<usize>]) -> Vec<usize> {
        let n = self.active.len();
        let mut labels = vec![0; n];
        for (slot, ms) in members.iter().enumerate() {
            if self.active[slot] {
                for &e in ms {
                    labels[e] = slot;
                }
            }
        }
        labels
    }
}

/// Runs merges until `stop` returns true or no admissible pair remains.
pub(crate) fn run<P: Policy>(policy: &mut P, n: usize, stop: impl Fn(usize) -> bool) -> Agglomerator {
    let mut agg = Agglomerator::new(n, policy);
    let mut clusters = n;
    while !stop(clusters) {
        let Some((a, b)) = agg.best_pair(policy) else { break };
        agg.merge(a, b, policy);
        clusters -= 1;
    }
    debug_assert_eq!(clusters, agg.active_count());
    agg
}
