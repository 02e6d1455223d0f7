//! Actual modular structure, recovered from the folder hierarchy.
//!
//! Each lowest-level folder is a module: two files share a module exactly
//! when their immediate parent directories are identical. A folder that
//! holds both files and sub-folders is a module for its direct files only.

use serde::Serialize;

use crate::consensus::mr_of;
use crate::depgraph::Entity;
use crate::error::Result;
use crate::modularize::{ModularSolution, SolutionDoc};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActualStructure {
    solution: ModularSolution,
    folders: Vec<String>,
}

/// Parent directory of a normalized path; `""` at the repository root.
pub fn parent_dir(path: &str) -> &str {
    path.rsplit_once('/').map_or("", |(dir, _)| dir)
}

/// Groups entities by parent directory. Comparison is byte-wise and
/// case-sensitive.
pub fn recover_modules(entities: &[Entity]) -> ActualStructure {
    let dirs: Vec<&str> = entities.iter().map(|e| parent_dir(&e.path)).collect();
    let solution = ModularSolution::from_labels(&dirs, "actual");
    let mut folders = vec![String::new(); solution.module_count()];
    for (e, dir) in dirs.iter().enumerate() {
        folders[solution.module_of(e)] = dir.to_string();
    }
    ActualStructure { solution, folders }
}

impl ActualStructure {
    pub fn solution(&self) -> &ModularSolution {
        &self.solution
    }

    pub fn module_count(&self) -> usize {
        self.solution.module_count()
    }

    pub fn len(&self) -> usize {
        self.solution.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solution.is_empty()
    }

    /// Folder of module `module`.
    pub fn folder(&self, module: usize) -> &str {
        &self.folders[module]
    }

    pub fn folders(&self) -> &[String] {
        &self.folders
    }

    pub fn to_doc(&self) -> SolutionDoc {
        SolutionDoc {
            folders: Some(self.folders.clone()),
            ..self.solution.to_doc()
        }
    }

    /// Pair counts of the actual design.
    pub fn pair_counts(&self) -> PairCounts {
        let total = self.len() * self.len().saturating_sub(1) / 2;
        let collocated = self
            .solution
            .modules()
            .iter()
            .map(|m| m.len() * (m.len() - 1) / 2)
            .sum();
        PairCounts {
            total,
            collocated,
            separated: total - collocated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairCounts {
    pub total: usize,
    pub collocated: usize,
    pub separated: usize,
}

/// Actual modular relation of `i` and `j`: 1 if they share a folder.
pub fn actual_mr(structure: &ActualStructure, i: usize, j: usize) -> Result<u8> {
    mr_of(&structure.solution, i, j)
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn same_parent_same_module() {
        let s = recover_modules(&entities(&["src/a/X.java", "src/a/Y.java"]));
        assert_eq!(actual_mr(&s, 0, 1).unwrap(), 1);
        assert_eq!(s.folder(0), "src/a");
    }

    #[test]
    fn nested_folder_is_separate() {
        let s = recover_modules(&entities(&["src/a/X.java", "src/a/b/Z.java"]));
        assert_eq!(actual_mr(&s, 0, 1).unwrap(), 0);
        assert_eq!(s.folders(), ["src/a", "src/a/b"]);
    }

    #[test]
    fn root_file_has_empty_folder() {
        let s = recover_modules(&entities(&["Main.java"]));
        assert_eq!(s.module_count(), 1);
        assert_eq!(s.folder(0), "");
    }

    #[test]
    fn moving_a_file_flips_relation() {
        let mut es = entities(&["a/X.java", "a/Y.java", "b/Z.java"]);
        assert_eq!(actual_mr(&recover_modules(&es), 1, 2).unwrap(), 0);
        es[1].path = "b/Y.java".into();
        assert_eq!(actual_mr(&recover_modules(&es), 1, 2).unwrap(), 1);
    }

    #[test]
    fn case_sensitive() {
        let s = recover_modules(&entities(&["A/x.c", "a/y.c"]));
        assert_eq!(s.module_count(), 2);
    }

    #[test]
    fn pair_counts_add_up() {
        let s = recover_modules(&entities(&["a/1", "a/2", "a/3", "b/4", "c/5"]));
        assert_eq!(
            s.pair_counts(),
            PairCounts {
                total: 10,
                collocated: 3,
                separated: 7
            }
        );
    }

    #[test]
    fn doc_carries_folders() {
        let s = recover_modules(&entities(&["a/1", "b/2", "a/3"]));
        let json = serde_json::to_string(&s.to_doc()).unwrap();
        assert_eq!(json, r#"{"tool":"actual","modules":[[0,2],[1]],"folders":["a","b"]}"#);
    }
}
