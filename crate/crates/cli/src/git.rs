use std::path::Path;
use std::process::Command;

use anyhow::{Context, Result};

use pairsmell::cochange::GIT_LOG_ARGS;
use pairsmell::evolution::Revision;

use crate::InputError;

fn git(repo: &Path, args: &[&str]) -> Result<Vec<u8>> {
    let out = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .output()
        .context("running git")?;
    if !out.status.success() {
        let stderr = String::from_utf8_lossy(&out.stderr);
        return Err(InputError(format!("git {} failed: {}", args.join(" "), stderr.trim())).into());
    }
    Ok(out.stdout)
}

/// Full commit id of `rev`.
pub fn resolve(repo: &Path, rev: &str) -> Result<String> {
    let spec = format!("{rev}^{{commit}}");
    let out = git(repo, &["rev-parse", "--verify", &spec])?;
    Ok(String::from_utf8_lossy(&out).trim().to_string())
}

/// Numstat log of the history reachable from `rev`, newest first.
pub fn numstat_log(repo: &Path, rev: &str) -> Result<String> {
    let mut args: Vec<&str> = GIT_LOG_ARGS.to_vec();
    args.push(rev);
    Ok(String::from_utf8_lossy(&git(repo, &args)?).into_owned())
}

/// Commits reachable from `rev` with their committer timestamps.
pub fn revisions(repo: &Path, rev: &str) -> Result<Vec<Revision>> {
    let out = git(repo, &["log", "--format=%H %ct", rev])?;
    String::from_utf8_lossy(&out)
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (id, ts) = l.split_once(' ').context("unexpected git log line")?;
            Ok(Revision {
                id: id.to_string(),
                timestamp: ts.parse().context("unexpected git timestamp")?,
            })
        })
        .collect()
}

/// Writes the tree of commit `id` into `dest`.
pub fn extract(repo: &Path, id: &str, dest: &Path) -> Result<()> {
    let tar = git(repo, &["archive", "--format=tar", id])?;
    tar::Archive::new(tar.as_slice())
        .unpack(dest)
        .with_context(|| format!("unpacking snapshot {id}"))
}
