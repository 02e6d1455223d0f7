//! Pair smells and their prevalence.
//!
//! A pair is *InSep* (inapt separated) when the folders separate it but the
//! apt relation collocates it, and *InCol* (inapt collocated) in the
//! opposite case. Pairs without an apt relation never smell.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::consensus::{AptClassification, AptMr, CoAssociationMatrix};
use crate::depgraph::Entity;
use crate::error::{Error, Result};
use crate::modularize::{is_body, is_header, split_path};
use crate::structure::ActualStructure;

pub const DSM_DEFAULT_LIMIT: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SmellForm {
    InSep,
    InCol,
}

impl fmt::Display for SmellForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmellForm::InSep => "InSep",
            SmellForm::InCol => "InCol",
        })
    }
}

/// One smelly pair. `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSmellRecord {
    pub a: usize,
    pub b: usize,
    pub actual: u8,
    pub apt: u8,
    pub form: SmellForm,
    /// Co-association value of the pair.
    pub coassoc: f64,
}

/// Compares apt relations with the actual structure. Records come out
/// sorted by `(a, b)`.
pub fn detect(apt: &AptClassification<'_>, actual: &ActualStructure) -> Result<Vec<PairSmellRecord>> {
    if apt.n() != actual.len() {
        return Err(Error::Validation(format!(
            "apt relations cover {} entities but the actual structure has {}",
            apt.n(),
            actual.len()
        )));
    }
    let sol = actual.solution();
    let matrix = apt.matrix();
    let records = apt
        .iter()
        .filter_map(|(a, b, label)| {
            let together = sol.module_of(a) == sol.module_of(b);
            let form = match (together, label) {
                (false, AptMr::AptCollocated) => SmellForm::InSep,
                (true, AptMr::AptSeparated) => SmellForm::InCol,
                _ => return None,
            };
            Some(PairSmellRecord {
                a,
                b,
                actual: u8::from(together),
                apt: label.relation().expect("smelly pairs have an apt relation"),
                form,
                coassoc: matrix.value(a, b),
            })
        })
        .collect();
    Ok(records)
}

/// Whether two paths are a C/C++ body and header with the same stem.
pub fn is_body_header_pair(a: &str, b: &str) -> bool {
    let (_, sa, ea) = split_path(a);
    let (_, sb, eb) = split_path(b);
    sa == sb && ((is_header(ea) && is_body(eb)) || (is_body(ea) && is_header(eb)))
}

/// Splits off InSep records whose pair is a body and its header, returning
/// `(kept, suppressed)`.
pub fn suppress_body_header(
    records: Vec<PairSmellRecord>,
    entities: &[Entity],
) -> (Vec<PairSmellRecord>, Vec<PairSmellRecord>) {
    records.into_iter().partition(|r| {
        !(r.form == SmellForm::InSep && is_body_header_pair(&entities[r.a].path, &entities[r.b].path))
    })
}

/// Pair counts crossing apt and actual relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Venn {
    pub apt_collocated: usize,
    pub apt_separated: usize,
    pub no_consensus: usize,
    pub actual_collocated: usize,
    pub actual_separated: usize,
    pub apt_collocated_actual_collocated: usize,
    pub apt_collocated_actual_separated: usize,
    pub apt_separated_actual_collocated: usize,
    pub apt_separated_actual_separated: usize,
}

/// Denominators for prevalence figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniverseStats {
    pub entities: usize,
    pub separated_pairs: usize,
    pub collocated_pairs: usize,
    pub venn: Venn,
}

impl UniverseStats {
    pub fn new(apt: &AptClassification<'_>, actual: &ActualStructure) -> Result<Self> {
        if apt.n() != actual.len() {
            return Err(Error::Validation("apt and actual universes differ".into()));
        }
        let sol = actual.solution();
        let mut venn = Venn::default();
        for (a, b, label) in apt.iter() {
            let together = sol.module_of(a) == sol.module_of(b);
            if together {
                venn.actual_collocated += 1;
            } else {
                venn.actual_separated += 1;
            }
            match (label, together) {
                (AptMr::AptCollocated, true) => venn.apt_collocated_actual_collocated += 1,
                (AptMr::AptCollocated, false) => venn.apt_collocated_actual_separated += 1,
                (AptMr::AptSeparated, true) => venn.apt_separated_actual_collocated += 1,
                (AptMr::AptSeparated, false) => venn.apt_separated_actual_separated += 1,
                (AptMr::NoConsensus, _) => venn.no_consensus += 1,
            }
        }
        venn.apt_collocated = venn.apt_collocated_actual_collocated + venn.apt_collocated_actual_separated;
        venn.apt_separated = venn.apt_separated_actual_collocated + venn.apt_separated_actual_separated;
        Ok(Self {
            entities: actual.len(),
            separated_pairs: venn.actual_separated,
            collocated_pairs: venn.actual_collocated,
            venn,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrevalenceStats {
    pub insep_pairs: usize,
    pub incol_pairs: usize,
    /// InSep pairs over actually separated pairs.
    pub insep_pair_pct: f64,
    /// InCol pairs over actually collocated pairs.
    pub incol_pair_pct: f64,
    pub insep_entities: usize,
    pub incol_entities: usize,
    pub insep_entity_pct: f64,
    pub incol_entity_pct: f64,
    pub insep_density: f64,
    pub incol_density: f64,
    pub entities: usize,
    pub separated_pairs: usize,
    pub collocated_pairs: usize,
    pub venn: Venn,
}

/// Average number of smell instances touching each affected entity:
/// `2 * instances / entities`, or 0 when no entity is affected.
pub fn density(instances: usize, entities: usize) -> f64 {
    if entities == 0 {
        0.0
    } else {
        2.0 * instances as f64 / entities as f64
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn prevalence(records: &[PairSmellRecord], universe: &UniverseStats) -> PrevalenceStats {
    let mut count = [0usize; 2];
    let mut involved: [BTreeSet<usize>; 2] = Default::default();
    for r in records {
        let k = r.form as usize;
        count[k] += 1;
        involved[k].insert(r.a);
        involved[k].insert(r.b);
    }
    let [insep, incol] = count;
    let (insep_entities, incol_entities) = (involved[0].len(), involved[1].len());
    PrevalenceStats {
        insep_pairs: insep,
        incol_pairs: incol,
        insep_pair_pct: ratio(insep, universe.separated_pairs),
        incol_pair_pct: ratio(incol, universe.collocated_pairs),
        insep_entities,
        incol_entities,
        insep_entity_pct: ratio(insep_entities, universe.entities),
        incol_entity_pct: ratio(incol_entities, universe.entities),
        insep_density: density(insep, insep_entities),
        incol_density: density(incol, incol_entities),
        entities: universe.entities,
        separated_pairs: universe.separated_pairs,
        collocated_pairs: universe.collocated_pairs,
        venn: universe.venn,
    }
}

/// One record as written to reports, with entity paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordDoc {
    pub form: SmellForm,
    pub a: String,
    pub b: String,
    pub actual: u8,
    pub apt: u8,
}

impl RecordDoc {
    pub fn new(record: &PairSmellRecord, entities: &[Entity]) -> Self {
        Self {
            form: record.form,
            a: entities[record.a].path.clone(),
            b: entities[record.b].path.clone(),
            actual: record.actual,
            apt: record.apt,
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV with the same columns as the JSON records.
pub fn records_to_csv(records: &[RecordDoc]) -> String {
    let mut out = String::from("form,a,b,actual,apt\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.form,
            csv_field(&r.a),
            csv_field(&r.b),
            r.actual,
            r.apt
        )
        .unwrap();
    }
    out
}

/// Renders a design-structure matrix of co-association values for
/// `subset`, grouped by actual module with `|` and `-` marking module
/// boundaries.
pub fn render_dsm(
    subset: &[usize],
    coassoc: &CoAssociationMatrix,
    actual: &ActualStructure,
    entities: &[Entity],
    limit: usize,
) -> Result<String> {
    let mut ids: Vec<usize> = subset.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() > limit {
        return Err(Error::Parameter(format!(
            "{} entities exceed the display limit of {limit}; raise it with --limit",
            ids.len()
        )));
    }
    if let Some(&bad) = ids.iter().find(|&&i| i >= coassoc.n() || i >= entities.len()) {
        return Err(Error::Parameter(format!("entity {bad} out of range")));
    }
    let sol = actual.solution();
    ids.sort_by_key(|&i| (sol.module_of(i), i));
    let starts_block = |k: usize| k > 0 && sol.module_of(ids[k]) != sol.module_of(ids[k - 1]);

    let labels: Vec<String> = ids
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let path = &entities[i].path;
            format!("{:>3} {}", k + 1, path.rsplit('/').next().unwrap_or(path))
        })
        .collect();
    let width = labels.iter().map(String::len).max().unwrap_or(0);

    let mut out = String::new();
    let mut header = format!("{:width$}", "");
    let mut rule = "-".repeat(width);
    for k in 0..ids.len() {
        if starts_block(k) {
            header.push_str(" |");
            rule.push_str("-+");
        }
        write!(header, " {:>4}", k + 1).unwrap();
        rule.push_str("-----");
    }
    writeln!(out, "{}", header.trim_end()).unwrap();
    for (r, &i) in ids.iter().enumerate() {
        if starts_block(r) {
            writeln!(out, "{rule}").unwrap();
        }
        let mut line = format!("{:width$}", labels[r]);
        for (c, &j) in ids.iter().enumerate() {
            if starts_block(c) {
                line.push_str(" |");
            }
            if i == j {
                line.push_str("   --");
            } else {
                write!(line, " {:4.2}", coassoc.value(i, j)).unwrap();
            }
        }
        writeln!(out, "{line}").unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consensus::{build_coassociation, classify_apt};
    use crate::modularize::ModularSolution;
    use crate::structure::recover_modules;

    fn entities(paths: &[&str]) -> Vec<Entity> {
        paths
            .iter()
            .enumerate()
            .map(|(id, p)| Entity {
                id,
                path: p.to_string(),
            })
            .collect()
    }

    fn sols(labels: &[&[usize]]) -> Vec<ModularSolution> {
        labels.iter().map(|l| ModularSolution::from_labels(l, "t")).collect()
    }

    #[test]
    fn insep_when_apt_collocates_separated_pair() {
        let es = entities(&["a/X.java", "b/Y.java"]);
        let m = build_coassociation(&sols(&[&[0, 0], &[0, 0]])).unwrap();
        let recs = detect(&classify_apt(&m), &recover_modules(&es)).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!((recs[0].form, recs[0].actual, recs[0].apt), (SmellForm::InSep, 0, 1));
        assert_eq!(recs[0].coassoc, 1.0);
    }

    #[test]
    fn incol_when_apt_separates_collocated_pair() {
        let es = entities(&["a/X.java", "a/Y.java"]);
        let m = build_coassociation(&sols(&[&[0, 1], &[0, 1]])).unwrap();
        let recs = detect(&classify_apt(&m), &recover_modules(&es)).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!((recs[0].form, recs[0].actual, recs[0].apt), (SmellForm::InCol, 1, 0));
    }

    #[test]
    fn agreement_and_no_consensus_are_silent() {
        let es = entities(&["a/X.java", "a/Y.java", "b/Z.java"]);
        let m = build_coassociation(&sols(&[&[0, 0, 1], &[0, 0, 0]])).unwrap();
        let recs = detect(&classify_apt(&m), &recover_modules(&es)).unwrap();
        assert!(recs.is_empty());
    }

    #[test]
    fn universe_mismatch() {
        let es = entities(&["a/X.java"]);
        let m = build_coassociation(&sols(&[&[0, 0], &[0, 0]])).unwrap();
        assert!(matches!(
            detect(&classify_apt(&m), &recover_modules(&es)),
            Err(Error::Validation(_))
        ));
    }

    fn record(a: usize, b: usize, form: SmellForm) -> PairSmellRecord {
        let (actual, apt) = match form {
            SmellForm::InSep => (0, 1),
            SmellForm::InCol => (1, 0),
        };
        PairSmellRecord {
            a,
            b,
            actual,
            apt,
            form,
            coassoc: apt as f64,
        }
    }

    #[test]
    fn density_examples() {
        assert!((density(27, 34) - 1.59).abs() < 0.005);
        assert!((density(143, 86) - 3.33).abs() < 0.005);
        assert_eq!(density(1, 2), 1.0);
        assert_eq!(density(0, 0), 0.0);
    }

    #[test]
    fn prevalence_of_single_pair() {
        let universe = UniverseStats {
            entities: 4,
            separated_pairs: 4,
            collocated_pairs: 2,
            venn: Venn::default(),
        };
        let stats = prevalence(&[record(0, 3, SmellForm::InSep)], &universe);
        assert_eq!(stats.insep_entities, 2);
        assert_eq!(stats.insep_density, 1.0);
        assert_eq!(stats.insep_pair_pct, 0.25);
        assert_eq!(stats.insep_entity_pct, 0.5);
        assert_eq!(stats.incol_density, 0.0);
    }

    #[test]
    fn body_header_suppression() {
        let es = entities(&["inc/m.h", "src/m.c", "src/x.c"]);
        let recs = vec![record(0, 1, SmellForm::InSep), record(0, 2, SmellForm::InSep)];
        let (kept, suppressed) = suppress_body_header(recs, &es);
        assert_eq!(kept.len(), 1);
        assert_eq!((suppressed[0].a, suppressed[0].b), (0, 1));
    }

    #[test]
    fn csv_quotes_commas() {
        let docs = vec![RecordDoc {
            form: SmellForm::InCol,
            a: "a,b.c".into(),
            b: "x.c".into(),
            actual: 1,
            apt: 0,
        }];
        assert_eq!(records_to_csv(&docs), "form,a,b,actual,apt\nInCol,\"a,b.c\",x.c,1,0\n");
    }

    #[test]
    fn dsm_marks_module_boundaries() {
        let es = entities(&["a/A.java", "a/B.java", "b/C.java"]);
        let m = build_coassociation(&sols(&[&[0, 1, 0], &[0, 1, 0]])).unwrap();
        let actual = recover_modules(&es);
        let text = render_dsm(&[0, 1, 2], &m, &actual, &es, DSM_DEFAULT_LIMIT).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("  1 A.java"));
        // A and C: grouped by every tool across the module boundary.
        assert!(lines[1].ends_with("| 1.00"), "{text}");
        // A and B: separated by every tool inside one module.
        assert!(lines[1].contains("   -- 0.00"), "{text}");
        assert!(lines[3].starts_with("---"), "{text}");
    }

    #[test]
    fn dsm_single_and_limit() {
        let es = entities(&["a/A.java", "a/B.java"]);
        let m = build_coassociation(&sols(&[&[0, 0], &[0, 0]])).unwrap();
        let actual = recover_modules(&es);
        let text = render_dsm(&[1], &m, &actual, &es, 30).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(matches!(render_dsm(&[0, 1], &m, &actual, &es, 1), Err(Error::Parameter(_))));
    }
}
