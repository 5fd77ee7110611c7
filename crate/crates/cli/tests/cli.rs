use std::path::Path;
use std::process::{Command, Output};

use websurf_core::{graph, MetricReport, ModelConfig, SeedSpec};

fn websurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_websurf"))
        .args(args)
        .env_remove("WEBSURF_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_metrics_matches_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    for (n, d, p) in [(100, 2, 0.5), (500, 1, 0.3), (1, 3, 0.9)] {
        let file = dir.path().join(format!("g{n}-{d}.txt"));
        let (ns, ds, ps) = (n.to_string(), d.to_string(), p.to_string());
        let out = websurf(&[
            "generate", "--model", "surfer", "--n", &ns, "--d", &ds, "--p", &ps, "--seed", "7",
            "--out", path_str(&file),
        ]);
        assert!(out.status.success());
        let out = websurf(&["metrics", "--in", path_str(&file)]);
        assert_eq!(out.status.code(), Some(0));
        let g = graph::generate(&ModelConfig::surfer(n, d, p, SeedSpec::new(7, 0))).unwrap();
        let expected = serde_json::to_string(&MetricReport::for_graph(&g)).unwrap();
        assert_eq!(stdout(&out), format!("{expected}\n"));
    }
}

#[test]
fn single_vertex_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    assert!(websurf(&["generate", "--n", "1", "--out", path_str(&file)]).status.success());
    let out = websurf(&["metrics", "--in", path_str(&file)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["height"], 0);
    assert_eq!(v["diameter"], 0);
}

#[test]
fn theory_eval_p0() {
    let out = websurf(&["theory", "eval", "--fn", "p0"]);
    assert!(out.status.success());
    let p0: f64 = stdout(&out).trim().parse().unwrap();
    assert!((p0 - 0.206).abs() < 1e-3);
}

#[test]
fn theory_table_csv() {
    let out = websurf(&["theory", "table", "--fn", "cL,cU", "--p-grid", "0.1:0.9:0.2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,cL,cU");
    assert_eq!(lines.len(), 6);
    assert!(lines[2].starts_with("0.3,"));
}

#[test]
fn pagerank_csv_sums_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.txt");
    let args = ["generate", "--n", "50", "--d", "2", "--out", path_str(&file)];
    assert!(websurf(&args).status.success());
    let out = websurf(&["pagerank", "--in", path_str(&file), "--p", "0.3"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("vertex,prob"));
    let total: f64 = lines.map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
}

#[test]
fn exit_codes() {
    assert_eq!(websurf(&["generate", "--bogus"]).status.code(), Some(2));
    assert_eq!(websurf(&["metrics", "--in", "/definitely/not/here"]).status.code(), Some(3));
    assert_eq!(websurf(&["generate", "--n", "5", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(websurf(&["theory", "eval", "--fn", "cL"]).status.code(), Some(2));
    assert_eq!(websurf(&["verify", "--only", "99"]).status.code(), Some(2));
}

#[test]
fn malformed_edge_list_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.txt");
    std::fs::write(&file, "not a graph\n").unwrap();
    assert_eq!(websurf(&["metrics", "--in", path_str(&file)]).status.code(), Some(3));
}

#[test]
fn experiment_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h.csv");
    let out = websurf(&[
        "--threads", "1", "experiment", "--kind", "diameter", "--n", "100,1000", "--p", "0.5",
        "--trials", "4", "--seed", "3", "--out", path_str(&csv),
    ]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(1));
    let summary: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(summary["checks"].as_array().unwrap().len() >= 2);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 4);
    assert!(dir.path().join("h.json").exists());
}

#[test]
fn verify_subset() {
    let out = websurf(&["verify", "--only", "1,6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.starts_with("[PASS]")));
}

#[test]
fn branch_json() {
    let out = websurf(&["branch", "--splits", "99", "--p", "0.4", "--seed", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["nodes"], 199);
    assert_eq!(v["leaves"], 100);
}
