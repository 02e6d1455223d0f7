//! Co-change evidence mined from version history.
//!
//! Over a window of the most recent commits every entity `i` accumulates
//! its commit set `Cmt_i`, its churn `Ch_i` (lines added plus deleted) and
//! its developer set `Dev_i`. Three overlap rates compare two entities:
//!
//! ```text
//! COR = 2|Cmt_i ∩ Cmt_j| / (|Cmt_i| + |Cmt_j|)
//! CCO = Ch_ij / (Ch_i + Ch_j)      Ch_ij: lines of i and j in shared commits
//! DOR = 2|Dev_i ∩ Dev_j| / (|Dev_i| + |Dev_j|)
//! ```
//!
//! A zero denominator yields 0. The K-ratio divides the mean rate of smelly
//! pairs by the mean rate of a non-smelly baseline.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::consensus::pairs;
use crate::depgraph::{normalize_path, Entity};
use crate::error::{Error, Result};
use crate::smells::{PairSmellRecord, SmellForm};
use crate::stats::{compare_samples, mean};
use crate::structure::ActualStructure;

/// `git log` arguments producing the format read by [`ingest_log`].
pub const GIT_LOG_ARGS: [&str; 5] = [
    "log",
    "--no-merges",
    "--numstat",
    "--date=unix",
    "--pretty=format:@%H|%ae|%ad|%P",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChange {
    pub path: String,
    pub added: u64,
    pub deleted: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub hash: String,
    pub author: String,
    pub timestamp: i64,
    pub files: Vec<FileChange>,
}

/// Parses `git log --numstat` output with headers `@hash|author|time`,
/// optionally followed by `|parents`. Commits with more than one parent
/// are dropped. Records keep log order, newest first.
pub fn ingest_log(input: &str) -> Result<Vec<CommitRecord>> {
    let mut records = Vec::new();
    // `None` while inside a skipped merge commit.
    let mut current: Option<Option<CommitRecord>> = None;
    for (idx, raw) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('@') {
            if let Some(Some(done)) = current.take() {
                records.push(done);
            }
            current = Some(parse_header(header, lineno)?);
            continue;
        }
        let Some(slot) = current.as_mut() else {
            return Err(log_error(lineno, "numstat line before the first commit header"));
        };
        let change = parse_numstat(line, lineno)?;
        if let Some(commit) = slot.as_mut() {
            commit.files.push(change);
        }
    }
    if let Some(Some(done)) = current {
        records.push(done);
    }
    Ok(records)
}

fn log_error(line: usize, message: impl Into<String>) -> Error {
    Error::LogParse {
        line,
        message: message.into(),
    }
}

fn parse_header(header: &str, lineno: usize) -> Result<Option<CommitRecord>> {
    let fields: Vec<&str> = header.split('|').collect();
    if !(3..=4).contains(&fields.len()) {
        return Err(log_error(
            lineno,
            format!("expected '@hash|author|timestamp', got {:?}", header),
        ));
    }
    let hash = fields[0].trim();
    if hash.is_empty() || !hash.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(log_error(lineno, format!("bad commit hash {hash:?}")));
    }
    let timestamp = fields[2]
        .trim()
        .parse::<i64>()
        .map_err(|_| log_error(lineno, format!("bad unix timestamp {:?}", fields[2])))?;
    if fields.get(3).is_some_and(|p| p.split_whitespace().count() > 1) {
        return Ok(None);
    }
    Ok(Some(CommitRecord {
        hash: hash.to_string(),
        author: fields[1].trim().to_string(),
        timestamp,
        files: Vec::new(),
    }))
}

fn parse_numstat(line: &str, lineno: usize) -> Result<FileChange> {
    let mut parts = line.splitn(3, '\t');
    let (Some(a), Some(d), Some(p)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(log_error(lineno, format!("expected 'added<TAB>deleted<TAB>path', got {line:?}")));
    };
    let count = |s: &str| -> Result<u64> {
        if s == "-" {
            Ok(0)
        } else {
            s.parse()
                .map_err(|_| log_error(lineno, format!("bad line count {s:?}")))
        }
    };
    let path = rename_target(&unquote(p));
    let path = normalize_path(&path).map_err(|e| log_error(lineno, e.to_string()))?;
    Ok(FileChange {
        path,
        added: count(a)?,
        deleted: count(d)?,
    })
}

/// Undoes git's C-style quoting of unusual paths.
fn unquote(p: &str) -> String {
    let Some(inner) = p.strip_prefix('"').and_then(|s| s.strip_suffix('"')) else {
        return p.to_string();
    };
    let mut bytes = Vec::with_capacity(inner.len());
    let mut it = inner.bytes().peekable();
    while let Some(b) = it.next() {
        if b != b'\\' {
            bytes.push(b);
            continue;
        }
        match it.next() {
            Some(b'n') => bytes.push(b'\n'),
            Some(b't') => bytes.push(b'\t'),
            Some(d @ b'0'..=b'7') => {
                let mut v = u32::from(d - b'0');
                for _ in 0..2 {
                    match it.peek() {
                        Some(&o @ b'0'..=b'7') => {
                            v = v * 8 + u32::from(o - b'0');
                            it.next();
                        }
                        _ => break,
                    }
                }
                bytes.push(v as u8);
            }
            Some(other) => bytes.push(other),
            None => bytes.push(b'\\'),
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

/// Resolves numstat rename notation (`a/{x => y}/f`, `old => new`) to the
/// new path.
fn rename_target(p: &str) -> String {
    if let (Some(open), Some(close)) = (p.find('{'), p.rfind('}')) {
        if let Some((_, new)) = p[open + 1..close].split_once(" => ") {
            return format!("{}{}{}", &p[..open], new, &p[close + 1..]);
        }
    }
    match p.split_once(" => ") {
        Some((_, new)) => new.to_string(),
        None => p.to_string(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct EntityHistory {
    /// Lines changed per window commit.
    lines: BTreeMap<usize, u64>,
    churn: u64,
    devs: BTreeSet<usize>,
}

/// Per-entity change aggregates over a window of commits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeHistory {
    delta: usize,
    commits_used: usize,
    entities: Vec<EntityHistory>,
}

impl ChangeHistory {
    /// Aggregates the first `delta` records (log order, newest first) for
    /// `entities`. Paths outside the entity list are ignored.
    pub fn window(records: &[CommitRecord], delta: usize, entities: &[Entity]) -> Result<Self> {
        if delta == 0 {
            return Err(Error::Parameter("delta must be at least 1".into()));
        }
        let index: HashMap<&str, usize> = entities
            .iter()
            .enumerate()
            .map(|(i, e)| (e.path.as_str(), i))
            .collect();
        let mut authors: HashMap<&str, usize> = HashMap::new();
        let mut hist = vec![EntityHistory::default(); entities.len()];
        let used = &records[..delta.min(records.len())];
        for (c, commit) in used.iter().enumerate() {
            let next = authors.len();
            let dev = *authors.entry(commit.author.as_str()).or_insert(next);
            for f in &commit.files {
                let Some(&i) = index.get(f.path.as_str()) else { continue };
                let lines = f.added + f.deleted;
                let h = &mut hist[i];
                *h.lines.entry(c).or_insert(0) += lines;
                h.churn += lines;
                h.devs.insert(dev);
            }
        }
        Ok(Self {
            delta,
            commits_used: used.len(),
            entities: hist,
        })
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn commits_used(&self) -> usize {
        self.commits_used
    }

    /// Whether the history held fewer than `delta` commits.
    pub fn shortfall(&self) -> bool {
        self.commits_used < self.delta
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// `|Cmt_i|`.
    pub fn commit_count(&self, i: usize) -> usize {
        self.entities[i].lines.len()
    }

    /// `Ch_i`.
    pub fn churn(&self, i: usize) -> u64 {
        self.entities[i].churn
    }

    /// `|Dev_i|`.
    pub fn developer_count(&self, i: usize) -> usize {
        self.entities[i].devs.len()
    }

    pub fn cor(&self, i: usize, j: usize) -> f64 {
        self.pair(Metric::Cor, i, j).value
    }

    pub fn cco(&self, i: usize, j: usize) -> f64 {
        self.pair(Metric::Cco, i, j).value
    }

    pub fn dor(&self, i: usize, j: usize) -> f64 {
        self.pair(Metric::Dor, i, j).value
    }

    /// Value of `metric` for `(i, j)` together with whether its
    /// denominator was nonzero.
    pub fn pair(&self, metric: Metric, i: usize, j: usize) -> PairMetric {
        debug_assert!(i != j, "co-change of an entity with itself");
        let (a, b) = (&self.entities[i], &self.entities[j]);
        let (num, den) = match metric {
            Metric::Cor => {
                let shared = a.lines.keys().filter(|c| b.lines.contains_key(c)).count();
                (2 * shared as u64, (a.lines.len() + b.lines.len()) as u64)
            }
            Metric::Cco => {
                let joint: u64 = a
                    .lines
                    .iter()
                    .filter_map(|(c, la)| b.lines.get(c).map(|lb| la + lb))
                    .sum();
                (joint, a.churn + b.churn)
            }
            Metric::Dor => {
                let shared = a.devs.intersection(&b.devs).count();
                (2 * shared as u64, (a.devs.len() + b.devs.len()) as u64)
            }
        };
        if den == 0 {
            PairMetric {
                value: 0.0,
                active: false,
            }
        } else {
            PairMetric {
                value: num as f64 / den as f64,
                active: true,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Metric {
    Cor,
    Cco,
    Dor,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Cor, Metric::Cco, Metric::Dor];
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Cor => "COR",
            Metric::Cco => "CCO",
            Metric::Dor => "DOR",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetric {
    pub value: f64,
    /// False when the denominator was zero and `value` defaulted to 0.
    pub active: bool,
}

/// Means restricted to pairs whose metric denominator is nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveMeans {
    pub smelly_n: usize,
    pub baseline_n: usize,
    pub smelly_mean: Option<f64>,
    pub baseline_mean: Option<f64>,
    pub k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KRatioReport {
    pub metric: Metric,
    pub smelly_n: usize,
    pub baseline_n: usize,
    pub smelly_mean: f64,
    pub baseline_mean: f64,
    /// Undefined when the baseline mean is 0.
    pub k: Option<f64>,
    pub cohens_d: Option<f64>,
    pub t: Option<f64>,
    pub p_value: Option<f64>,
    pub smelly_zero_denominator: usize,
    pub baseline_zero_denominator: usize,
    pub active: ActiveMeans,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KRatioOutcome {
    Report(KRatioReport),
    NoData { metric: Metric, reason: String },
}

impl KRatioOutcome {
    pub fn report(&self) -> Option<&KRatioReport> {
        match self {
            KRatioOutcome::Report(r) => Some(r),
            KRatioOutcome::NoData { .. } => None,
        }
    }
}

fn ratio(num: Option<f64>, den: Option<f64>) -> Option<f64> {
    match (num, den) {
        (Some(n), Some(d)) if d > 0.0 => Some(n / d),
        _ => None,
    }
}

/// K-ratio of precomputed per-pair samples.
pub fn k_ratio_from_samples(metric: Metric, smelly: &[PairMetric], baseline: &[PairMetric]) -> KRatioOutcome {
    let no_data = |reason: &str| KRatioOutcome::NoData {
        metric,
        reason: reason.to_string(),
    };
    if smelly.is_empty() {
        return no_data("no smelly pairs");
    }
    if baseline.is_empty() {
        return no_data("no baseline pairs");
    }
    if smelly.iter().all(|p| !p.active) {
        return no_data("no smells changed in window");
    }
    let values = |s: &[PairMetric]| s.iter().map(|p| p.value).collect::<Vec<_>>();
    let active = |s: &[PairMetric]| s.iter().filter(|p| p.active).map(|p| p.value).collect::<Vec<_>>();
    let (sv, bv) = (values(smelly), values(baseline));
    let (sa, ba) = (active(smelly), active(baseline));
    let cmp = compare_samples(&sv, &bv);
    let (sm, bm) = (cmp.mean_a, cmp.mean_b);
    KRatioOutcome::Report(KRatioReport {
        metric,
        smelly_n: sv.len(),
        baseline_n: bv.len(),
        smelly_mean: sm,
        baseline_mean: bm,
        k: ratio(Some(sm), Some(bm)),
        cohens_d: cmp.cohens_d,
        t: cmp.t,
        p_value: cmp.p_value,
        smelly_zero_denominator: sv.len() - sa.len(),
        baseline_zero_denominator: bv.len() - ba.len(),
        active: ActiveMeans {
            smelly_n: sa.len(),
            baseline_n: ba.len(),
            smelly_mean: mean(&sa),
            baseline_mean: mean(&ba),
            k: ratio(mean(&sa), mean(&ba)),
        },
    })
}

pub fn k_ratio(
    history: &ChangeHistory,
    metric: Metric,
    smelly: &[(usize, usize)],
    baseline: &[(usize, usize)],
) -> KRatioOutcome {
    let sample = |ps: &[(usize, usize)]| -> Vec<PairMetric> {
        ps.iter().map(|&(i, j)| history.pair(metric, i, j)).collect()
    };
    k_ratio_from_samples(metric, &sample(smelly), &sample(baseline))
}

/// An entity pair `(i, j)` with `i < j`.
pub type Pair = (usize, usize);

/// Smelly pairs of `form` and their baseline: actually separated pairs
/// without an InSep smell, or actually collocated pairs without an InCol
/// smell.
pub fn smelly_and_baseline(
    form: SmellForm,
    records: &[PairSmellRecord],
    actual: &ActualStructure,
) -> (Vec<Pair>, Vec<Pair>) {
    let smelly: BTreeSet<(usize, usize)> = records
        .iter()
        .filter(|r| r.form == form)
        .map(|r| (r.a.min(r.b), r.a.max(r.b)))
        .collect();
    let sol = actual.solution();
    let want_together = form == SmellForm::InCol;
    let baseline = pairs(actual.len())
        .filter(|&(i, j)| (sol.module_of(i) == sol.module_of(j)) == want_together)
        .filter(|p| !smelly.contains(p))
        .collect();
    (smelly.into_iter().collect(), baseline)
}
