//! Lightweight import/include scanner for fixture-scale repositories.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use walkdir::WalkDir;

use super::{DependencyGraph, LoadOptions, RawEdge};
use crate::error::{Error, Result};

static JAVA_PACKAGE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*package\s+([\w.]+)\s*;").unwrap());
static JAVA_IMPORT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\s*import\s+(static\s+)?([\w.]+?)(\.\*)?\s*;").unwrap());
static C_INCLUDE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"^\s*#\s*include\s*"([^"]+)""#).unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanguageProfile {
    JavaImports,
    CIncludes,
}

impl LanguageProfile {
    pub fn extensions(self) -> &'static [&'static str] {
        match self {
            LanguageProfile::JavaImports => &["java"],
            LanguageProfile::CIncludes => &["c", "cc", "cpp", "h", "hpp"],
        }
    }

    fn edge_kind(self) -> &'static str {
        match self {
            LanguageProfile::JavaImports => "import",
            LanguageProfile::CIncludes => "include",
        }
    }
}

impl FromStr for LanguageProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "java-imports" => Ok(LanguageProfile::JavaImports),
            "c-includes" => Ok(LanguageProfile::CIncludes),
            other => Err(Error::Parameter(format!(
                "unknown scan profile {other:?} (expected java-imports or c-includes)"
            ))),
        }
    }
}

impl fmt::Display for LanguageProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LanguageProfile::JavaImports => "java-imports",
            LanguageProfile::CIncludes => "c-includes",
        })
    }
}

pub fn scan_sources(root: &Path, profile: LanguageProfile) -> Result<DependencyGraph> {
    scan_sources_with(root, profile, &LoadOptions::default())
}

/// Walks `root` and builds a graph from the files matching `profile`.
///
/// Each referenced file counts once per referencing file, however many
/// times the import or include is repeated. Unresolved references are
/// ignored.
pub fn scan_sources_with(
    root: &Path,
    profile: LanguageProfile,
    opts: &LoadOptions,
) -> Result<DependencyGraph> {
    let mut files: Vec<(String, String)> = Vec::new();
    let walker = WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
    for entry in walker {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let matches = entry
            .path()
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|ext| profile.extensions().contains(&ext));
        if !matches {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walkdir yields paths under root")
            .to_string_lossy()
            .replace('\\', "/");
        if !opts.filter.accepts(&rel) {
            continue;
        }
        let bytes = std::fs::read(entry.path()).map_err(|e| Error::io(entry.path(), e))?;
        files.push((rel, String::from_utf8_lossy(&bytes).into_owned()));
    }
    if files.is_empty() {
        return Err(Error::EmptyGraph(format!(
            "no {profile} source files under {}",
            root.display()
        )));
    }

    let targets: Vec<BTreeSet<usize>> = match profile {
        LanguageProfile::JavaImports => resolve_java(&files),
        LanguageProfile::CIncludes => resolve_c(&files),
    };
    let edges = targets
        .into_iter()
        .enumerate()
        .flat_map(|(src, dsts)| {
            dsts.into_iter().map(move |dst| RawEdge {
                src,
                dst,
                kind: profile.edge_kind().to_string(),
                weight: 1,
            })
        })
        .collect();
    let paths = files.into_iter().map(|(p, _)| p).collect();
    DependencyGraph::build(paths, edges, opts)
}

fn file_stem(path: &str) -> &str {
    let base = path.rsplit('/').next().unwrap_or(path);
    base.rsplit_once('.').map_or(base, |(stem, _)| stem)
}

fn resolve_java(files: &[(String, String)]) -> Vec<BTreeSet<usize>> {
    let packages: Vec<String> = files
        .iter()
        .map(|(_, src)| {
            src.lines()
                .find_map(|l| JAVA_PACKAGE.captures(l).map(|c| c[1].to_string()))
                .unwrap_or_default()
        })
        .collect();
    let mut by_fqn: BTreeMap<String, usize> = BTreeMap::new();
    let mut by_package: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, (path, _)) in files.iter().enumerate() {
        let stem = file_stem(path);
        let fqn = if packages[i].is_empty() {
            stem.to_string()
        } else {
            format!("{}.{stem}", packages[i])
        };
        by_fqn.entry(fqn).or_insert(i);
        by_package.entry(packages[i].as_str()).or_default().push(i);
    }

    files
        .iter()
        .map(|(_, src)| {
            let mut out = BTreeSet::new();
            for line in src.lines() {
                let Some(cap) = JAVA_IMPORT.captures(line) else {
                    continue;
                };
                let name = &cap[2];
                if cap.get(3).is_some() {
                    // `a.b.*` names a package; `static a.b.C.*` names a class.
                    if let Some(&cls) = by_fqn.get(name) {
                        out.insert(cls);
                    } else if let Some(members) = by_package.get(name) {
                        out.extend(members.iter().copied());
                    }
                    continue;
                }
                // Nested classes and static members: fall back to the longest
                // prefix naming a scanned class.
                let mut candidate = name;
                loop {
                    if let Some(&cls) = by_fqn.get(candidate) {
                        out.insert(cls);
                        break;
                    }
                    match candidate.rsplit_once('.') {
                        Some((head, _)) => candidate = head,
                        None => break,
                    }
                }
            }
            out
        })
        .collect()
}

fn dir_segments(path: &str) -> Vec<&str> {
    let mut segs: Vec<&str> = path.split('/').collect();
    segs.pop();
    segs
}

fn tree_distance(a: &[&str], b: &[&str]) -> usize {
    let common = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    (a.len() - common) + (b.len() - common)
}

fn resolve_c(files: &[(String, String)]) -> Vec<BTreeSet<usize>> {
    let mut by_basename: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, (path, _)) in files.iter().enumerate() {
        let base = path.rsplit('/').next().unwrap_or(path);
        by_basename.entry(base).or_default().push(i);
    }
    files
        .iter()
        .map(|(path, src)| {
            let here = dir_segments(path);
            let mut out = BTreeSet::new();
            for line in src.lines() {
                let Some(cap) = C_INCLUDE.captures(line) else {
                    continue;
                };
                let inc = &cap[1];
                let base = inc.rsplit('/').next().unwrap_or(inc);
                let Some(cands) = by_basename.get(base) else {
                    continue;
                };
                // Nearest candidate by directory-tree distance, then by path.
                let best = cands.iter().copied().min_by(|&a, &b| {
                    let da = tree_distance(&here, &dir_segments(&files[a].0));
                    let db = tree_distance(&here, &dir_segments(&files[b].0));
                    da.cmp(&db).then_with(|| files[a].0.cmp(&files[b].0))
                });
                out.extend(best);
            }
            out
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(root: &Path, rel: &str, body: &str) {
        let p = root.join(rel);
        fs::create_dir_all(p.parent().unwrap()).unwrap();
        fs::write(p, body).unwrap();
    }

    #[test]
    fn java_single_import() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "src/p/A.java", "package p;\nimport q.B;\nclass A {}\n");
        write(dir.path(), "src/q/B.java", "package q;\nclass B {}\n");
        let g = scan_sources(dir.path(), LanguageProfile::JavaImports).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.weight(0, 1), 1.0);
        assert_eq!(g.edges()[0].kind, "import");
    }

    #[test]
    fn java_duplicate_import_counts_once() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "A.java", "package p;\nimport p.B;\nimport p.B;\n");
        write(dir.path(), "B.java", "package p;\n");
        let g = scan_sources(dir.path(), LanguageProfile::JavaImports).unwrap();
        assert_eq!(g.weight(0, 1), 1.0);
    }

    #[test]
    fn java_wildcard_static_and_nested() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "a/Main.java",
            "package a;\nimport b.*;\nimport static c.Util.max;\nimport c.Outer.Inner;\nimport java.util.List;\n",
        );
        write(dir.path(), "b/X.java", "package b;\n");
        write(dir.path(), "b/Y.java", "package b;\n");
        write(dir.path(), "c/Util.java", "package c;\n");
        write(dir.path(), "c/Outer.java", "package c;\n");
        let g = scan_sources(dir.path(), LanguageProfile::JavaImports).unwrap();
        let main = g.index_of("a/Main.java").unwrap();
        let targets: Vec<&str> = g.outgoing(main).iter().map(|&(j, _)| g.path(j)).collect();
        assert_eq!(targets, vec!["b/X.java", "b/Y.java", "c/Outer.java", "c/Util.java"]);
    }

    #[test]
    fn c_include_same_dir() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "m.c", "#include \"m.h\"\n#include <stdio.h>\n");
        write(dir.path(), "m.h", "int f(void);\n");
        let g = scan_sources(dir.path(), LanguageProfile::CIncludes).unwrap();
        let (c, h) = (g.index_of("m.c").unwrap(), g.index_of("m.h").unwrap());
        assert_eq!(g.weight(c, h), 1.0);
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn c_include_prefers_nearest() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "lib/x/u.c", "#include \"util.h\"\n");
        write(dir.path(), "lib/x/util.h", "");
        write(dir.path(), "other/util.h", "");
        let g = scan_sources(dir.path(), LanguageProfile::CIncludes).unwrap();
        let src = g.index_of("lib/x/u.c").unwrap();
        let near = g.index_of("lib/x/util.h").unwrap();
        assert_eq!(g.neighbors(src), vec![near]);
    }

    #[test]
    fn isolated_files_kept_and_empty_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "README.md", "no code");
        assert!(matches!(
            scan_sources(dir.path(), LanguageProfile::JavaImports),
            Err(Error::EmptyGraph(_))
        ));
        write(dir.path(), "Lone.java", "class Lone {}");
        let g = scan_sources(dir.path(), LanguageProfile::JavaImports).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn missing_root_is_io_error() {
        let err = scan_sources(Path::new("/definitely/not/here"), LanguageProfile::CIncludes).unwrap_err();
        assert!(matches!(err, Error::Io { .. }), "{err}");
    }
}
