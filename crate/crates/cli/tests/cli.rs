use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn pairsmell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairsmell")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = pairsmell(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// a/C0 and b/C2 depend on each other, as do a/C1 and b/C3.
fn crossed_graph(dir: &Path) -> PathBuf {
    let paths = ["a/C0.java", "a/C1.java", "b/C2.java", "b/C3.java"];
    let edges = [(0, 2), (2, 0), (1, 3), (3, 1), (0, 1)];
    let doc = json!({
        "schema": "pairsmell-depgraph/1",
        "entities": paths.iter().enumerate().map(|(id, p)| json!({"id": id, "path": p})).collect::<Vec<_>>(),
        "edges": edges.iter().map(|&(s, d)| json!({"src": s, "dst": d, "kind": "import", "weight": 1})).collect::<Vec<_>>(),
    });
    let path = dir.join("graph.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    path
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn empty_graph_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("empty.json");
    std::fs::write(&g, r#"{"schema":"pairsmell-depgraph/1","entities":[],"edges":[]}"#).unwrap();
    let out = pairsmell(&["detect", "--graph", s(&g), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty graph"));
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = pairsmell(&["detect", "--graph", s(&dir.path().join("nope.json"))]);
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"schema\": ").unwrap();
    assert_eq!(pairsmell(&["detect", "--graph", s(&bad)]).status.code(), Some(2));

    let g = crossed_graph(dir.path());
    let out = pairsmell(&["detect", "--graph", s(&g), "--tools", "wca,bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = pairsmell(&["detect", "--graph", s(&g), "--threshold", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_and_json_reports_agree() {
    let dir = tempfile::tempdir().unwrap();
    let g = crossed_graph(dir.path());
    let o = dir.path().join("o");
    ok(&["detect", "--graph", s(&g), "--k", "2", "--out", s(&o), "--format", "csv,json"]);
    let report = read_json(&o.join("smells.json"));
    let from_json: Vec<String> = report["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| format!("{},{},{},{},{}", r["form"].as_str().unwrap(), r["a"].as_str().unwrap(), r["b"].as_str().unwrap(), r["actual"], r["apt"]))
        .collect();
    let csv = std::fs::read_to_string(o.join("smells.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("form,a,b,actual,apt"));
    assert_eq!(lines.map(String::from).collect::<Vec<_>>(), from_json);
    assert_eq!(report["metadata"]["k"], 2);
}

#[test]
fn csv_only_skips_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let g = crossed_graph(dir.path());
    let o = dir.path().join("o");
    ok(&["detect", "--graph", s(&g), "--out", s(&o), "--format", "csv"]);
    assert!(o.join("smells.csv").exists());
    assert!(!o.join("smells.json").exists());
    assert!(o.join("prevalence.json").exists());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = crossed_graph(dir.path());
    let cfg = dir.path().join("pairsmell.toml");
    std::fs::write(
        &cfg,
        format!("graph = {:?}\nk = 3\ntools = [\"wca\", \"limbo\"]\nout = {:?}\n", s(&g), s(&dir.path().join("from-config"))),
    )
    .unwrap();
    ok(&["--config", s(&cfg), "detect"]);
    let meta = &read_json(&dir.path().join("from-config/smells.json"))["metadata"];
    assert_eq!(meta["k"], 3);
    assert_eq!(meta["tools"], json!(["wca", "limbo"]));

    let o = dir.path().join("from-flag");
    ok(&["--config", s(&cfg), "detect", "--k", "2", "--out", s(&o)]);
    let meta = &read_json(&o.join("smells.json"))["metadata"];
    assert_eq!(meta["k"], 2);
    assert_eq!(meta["tools"], json!(["wca", "limbo"]));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "colour = \"red\"\n").unwrap();
    let out = pairsmell(&["--config", s(&cfg), "detect"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dsm_groups_entities_by_folder() {
    let dir = tempfile::tempdir().unwrap();
    let g = crossed_graph(dir.path());
    let out = ok(&["dsm", "--graph", s(&g), "--k", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 6, "{text}");
    assert!(rows[1].contains("C0.java") && rows[4].contains("C2.java"));
    assert!(rows[3].starts_with('-') && rows[3].contains('+'));

    let sub = ok(&["dsm", "--graph", s(&g), "--k", "2", "--entities", "a/C0.java,3"]);
    let text = String::from_utf8(sub.stdout).unwrap();
    assert!(text.contains("C0.java") && text.contains("C3.java") && !text.contains("C1.java"));

    let out = pairsmell(&["dsm", "--graph", s(&g), "--limit", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_graph_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let g = crossed_graph(dir.path());
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    ok(&["export-graph", "--graph", s(&g), "--out", s(&first)]);
    ok(&["export-graph", "--graph", s(&first), "--out", s(&second)]);
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(read_json(&first)["edges"].as_array().unwrap().len(), 5);
}

#[test]
fn export_graph_applies_filters() {
    let dir = tempfile::tempdir().unwrap();
    let g = crossed_graph(dir.path());
    let out = ok(&["export-graph", "--graph", s(&g), "--exclude", "b/**"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let paths: Vec<&str> = doc["entities"].as_array().unwrap().iter().map(|e| e["path"].as_str().unwrap()).collect();
    assert_eq!(paths, ["a/C0.java", "a/C1.java"]);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 1);
}

fn numstat_log(commits: &[(&str, &[&str])]) -> String {
    let mut log = String::new();
    for (c, (author, files)) in commits.iter().enumerate() {
        log.push_str(&format!("@{:040x}|{author}|{}\n", c + 1, 1_700_000_000 - c as i64 * 3600));
        for f in *files {
            log.push_str(&format!("3\t1\t{f}\n"));
        }
        log.push('\n');
    }
    log
}

#[test]
fn cochange_reports_windows_and_shortfall() {
    let dir = tempfile::tempdir().unwrap();
    let g = crossed_graph(dir.path());
    let o = dir.path().join("o");
    ok(&["detect", "--graph", s(&g), "--k", "2", "--out", s(&o)]);
    let log = dir.path().join("log.txt");
    std::fs::write(
        &log,
        numstat_log(&[
            ("x@e.org", &["a/C0.java", "b/C2.java"]),
            ("y@e.org", &["a/C1.java", "b/C3.java"]),
            ("x@e.org", &["a/C0.java", "a/C1.java"]),
            ("y@e.org", &["b/C2.java"]),
        ]),
    )
    .unwrap();
    ok(&["cochange", "--smells", s(&o.join("smells.json")), "--log", s(&log), "--delta", "2,10", "--out", s(&o)]);
    let doc = read_json(&o.join("cochange.json"));
    assert_eq!(doc["metadata"]["commits"], 4);
    let windows = doc["windows"].as_array().unwrap();
    assert_eq!(windows.len(), 2);
    assert_eq!(windows[0]["delta"], 2);
    assert_eq!(windows[0]["commits_used"], 2);
    assert_eq!(windows[0]["shortfall"], false);
    assert_eq!(windows[1]["commits_used"], 4);
    assert_eq!(windows[1]["shortfall"], true);
    assert_eq!(windows[0]["incol"].as_array().unwrap().len(), 3);
}

#[test]
fn cochange_rejects_zero_delta() {
    let dir = tempfile::tempdir().unwrap();
    let g = crossed_graph(dir.path());
    let o = dir.path().join("o");
    ok(&["detect", "--graph", s(&g), "--k", "2", "--out", s(&o)]);
    let log = dir.path().join("log.txt");
    std::fs::write(&log, numstat_log(&[("x@e.org", &["a/C0.java"])])).unwrap();
    let out = pairsmell(&["cochange", "--smells", s(&o.join("smells.json")), "--log", s(&log), "--delta", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evolve_without_history_is_insufficient_data() {
    let dir = tempfile::tempdir().unwrap();
    let repo = dir.path().join("repo");
    std::fs::create_dir(&repo).unwrap();
    let init = Command::new("git").args(["init", "-q"]).arg(&repo).status().unwrap();
    assert!(init.success());
    std::fs::write(repo.join("A.java"), "class A {}\n").unwrap();
    let git = |args: &[&str]| {
        let st = Command::new("git")
            .arg("-C")
            .arg(&repo)
            .args(["-c", "user.name=t", "-c", "user.email=t@e.org", "-c", "commit.gpgsign=false"])
            .args(args)
            .status()
            .unwrap();
        assert!(st.success());
    };
    git(&["add", "-A"]);
    git(&["commit", "-q", "-m", "one"]);
    // One commit yields one snapshot, too few for a trend.
    let out = pairsmell(&["evolve", "--scan", "java-imports", "--repo", s(&repo), "--out", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
