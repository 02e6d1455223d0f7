//! Smell trends across sampled snapshots of a repository.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smells::PrevalenceStats;
use crate::stats::linear_fit;

pub const DEFAULT_INTERVAL_DAYS: u32 = 14;
pub const DEFAULT_SNAPSHOT_COUNT: usize = 25;
pub const DEFAULT_ALPHA: f64 = 0.05;

const DAY: i64 = 86_400;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Revision {
    pub id: String,
    /// Seconds since the epoch.
    pub timestamp: i64,
}

/// Picks up to `count` snapshots walking back from `anchor` in steps of
/// `interval_days`. Each boundary takes the latest commit at or before it;
/// a boundary that would repeat the previous pick (no commit in that
/// period) is skipped, and boundaries older than the history yield
/// nothing. Timestamp ties go to the revision listed first. The result is
/// ordered oldest to newest and ends at the anchor.
pub fn sample_snapshots(
    history: &[Revision],
    interval_days: u32,
    count: usize,
    anchor: &str,
) -> Result<Vec<Revision>> {
    if history.is_empty() {
        return Err(Error::InsufficientData("empty revision history".into()));
    }
    if interval_days == 0 || count == 0 {
        return Err(Error::Parameter("interval and snapshot count must be positive".into()));
    }
    let anchor = history
        .iter()
        .find(|r| r.id == anchor)
        .ok_or_else(|| Error::Parameter(format!("anchor revision {anchor:?} not in history")))?;
    let step = i64::from(interval_days) * DAY;

    let mut picks: Vec<&Revision> = Vec::new();
    for k in 0..count as i64 {
        let boundary = anchor.timestamp - k * step;
        let pick = history
            .iter()
            .filter(|r| r.timestamp <= boundary)
            .reduce(|best, r| if r.timestamp > best.timestamp { r } else { best });
        let pick = if k == 0 { Some(anchor) } else { pick };
        let Some(pick) = pick else { break };
        if picks.last().is_some_and(|last| last.id == pick.id) {
            continue;
        }
        picks.push(pick);
    }
    picks.reverse();
    Ok(picks.into_iter().cloned().collect())
}

/// Smell figures of one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotPoint {
    pub insep_pair_pct: f64,
    pub incol_pair_pct: f64,
    pub insep_entity_pct: f64,
    pub incol_entity_pct: f64,
    pub insep_pairs: usize,
    pub incol_pairs: usize,
    pub entities: usize,
}

impl From<&PrevalenceStats> for SnapshotPoint {
    fn from(s: &PrevalenceStats) -> Self {
        Self {
            insep_pair_pct: s.insep_pair_pct,
            incol_pair_pct: s.incol_pair_pct,
            insep_entity_pct: s.insep_entity_pct,
            incol_entity_pct: s.incol_entity_pct,
            insep_pairs: s.insep_pairs,
            incol_pairs: s.incol_pairs,
            entities: s.entities,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    InsepPair,
    IncolPair,
    InsepEntity,
    IncolEntity,
}

impl SeriesKind {
    pub const ALL: [SeriesKind; 4] = [
        SeriesKind::InsepPair,
        SeriesKind::IncolPair,
        SeriesKind::InsepEntity,
        SeriesKind::IncolEntity,
    ];

    pub fn of(self, p: &SnapshotPoint) -> f64 {
        match self {
            SeriesKind::InsepPair => p.insep_pair_pct,
            SeriesKind::IncolPair => p.incol_pair_pct,
            SeriesKind::InsepEntity => p.insep_entity_pct,
            SeriesKind::IncolEntity => p.incol_entity_pct,
        }
    }
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::InsepPair => "insep_pair",
            SeriesKind::IncolPair => "incol_pair",
            SeriesKind::InsepEntity => "insep_entity",
            SeriesKind::IncolEntity => "incol_entity",
        })
    }
}

/// Snapshots with their smell figures; a failed snapshot leaves a gap.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries {
    pub snapshots: Vec<Revision>,
    pub points: Vec<Option<SnapshotPoint>>,
    /// `(snapshot position, message)` for every gap.
    pub failures: Vec<(usize, String)>,
}

impl SnapshotSeries {
    /// Values of one series keyed by 1-based snapshot index, gaps omitted.
    pub fn values(&self, kind: SeriesKind) -> Vec<(usize, f64)> {
        self.points
            .iter()
            .enumerate()
            .filter_map(|(t, p)| p.as_ref().map(|p| (t + 1, kind.of(p))))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "snapshot_index,timestamp,insep_pair_pct,incol_pair_pct,insep_entity_pct,incol_entity_pct\n",
        );
        for (t, (rev, p)) in self.snapshots.iter().zip(&self.points).enumerate() {
            write!(out, "{},{}", t + 1, rev.timestamp).unwrap();
            for kind in SeriesKind::ALL {
                match p {
                    Some(p) => write!(out, ",{:.6}", kind.of(p)).unwrap(),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Runs `analyze` on every snapshot in parallel. Failures become gaps.
pub fn series_percentages<F>(snapshots: &[Revision], analyze: F) -> SnapshotSeries
where
    F: Fn(&Revision) -> Result<PrevalenceStats> + Sync,
{
    let results: Vec<Result<PrevalenceStats>> = std::thread::scope(|s| {
        let handles: Vec<_> = snapshots
            .iter()
            .map(|rev| {
                let analyze = &analyze;
                s.spawn(move || analyze(rev))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("snapshot worker panicked"))
            .collect()
    });
    let mut points = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (t, r) in results.into_iter().enumerate() {
        match r {
            Ok(stats) => points.push(Some(SnapshotPoint::from(&stats))),
            Err(e) => {
                failures.push((t, e.to_string()));
                points.push(None);
            }
        }
    }
    SnapshotSeries {
        snapshots: snapshots.to_vec(),
        points,
        failures,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Increasing,
    Decreasing,
    Stable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendResult {
    pub slope: f64,
    pub intercept: f64,
    pub p_value: f64,
    pub classification: Trend,
    pub points: usize,
}

/// Least-squares trend of `(index, value)` points. Significant slopes at
/// level `alpha` are increasing or decreasing; the rest are stable. A
/// series without spread is stable with p = 1.
pub fn fit_trend(points: &[(usize, f64)], alpha: f64) -> Result<TrendResult> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "trend needs at least 3 points, got {}",
            points.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!("alpha {alpha} must lie in (0, 1)")));
    }
    let y0 = points[0].1;
    if points.iter().all(|&(_, y)| y == y0) {
        return Ok(TrendResult {
            slope: 0.0,
            intercept: y0,
            p_value: 1.0,
            classification: Trend::Stable,
            points: points.len(),
        });
    }
    let x: Vec<f64> = points.iter().map(|&(t, _)| t as f64).collect();
    let y: Vec<f64> = points.iter().map(|&(_, v)| v).collect();
    let fit = linear_fit(&x, &y)
        .ok_or_else(|| Error::InsufficientData("trend needs distinct snapshot indices".into()))?;
    let classification = if fit.p_value >= alpha || fit.slope == 0.0 {
        Trend::Stable
    } else if fit.slope > 0.0 {
        Trend::Increasing
    } else {
        Trend::Decreasing
    };
    Ok(TrendResult {
        slope: fit.slope,
        intercept: fit.intercept,
        p_value: fit.p_value,
        classification,
        points: points.len(),
    })
}
