use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contagion-lab"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn csv_output_has_provenance_and_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"graph": {"kind": "erdos_renyi", "n": 200, "mean_degree": 4, "seed": 1}, "seed": 5}"#,
    );
    let out = lab(&["membership", "--config", &cfg, "--trials", "50"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# contagion-lab ") && lines[0].contains("config_hash="));
    assert_eq!(lines[1], "network,q,trials,threshold,nodes,percent");
    // Five default thresholds, descending.
    let thresholds: Vec<&str> = lines[2..7].iter().map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(thresholds.len(), 5);
    assert!(lines[2].contains(",0.990000,"));
}

#[test]
fn single_rate_grid_gives_exact_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"graph": {"kind": "edges", "n": 5, "edges": [[0, 1], [1, 2], [3, 4]]}}"#,
    );
    let out = lab(&["sweep", "--config", &cfg, "--q", "1.0", "--trials", "7"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().nth(2).unwrap(),
        "1.000000,7,0.600000,0.000000,0.400000,0.000000"
    );
}

#[test]
fn zero_threshold_covers_every_node() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"graph": {"kind": "erdos_renyi", "n": 100, "p": "0.03"}, "thresholds": [0.0]}"#,
    );
    let out = lab(&["membership", "--config", &cfg, "--trials", "20"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.lines().nth(2).unwrap().ends_with(",0.000000,100,100.000000"),
        "{text}"
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lab(&["components"]).status.code(), Some(2));
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"graph": {"kind": "edges", "n": 2, "edges": [[0, 1]]}, "thresholds": [0.5, 0.9]}"#,
    );
    assert_eq!(lab(&["membership", "--config", &bad]).status.code(), Some(2));
    let bad_q = write(
        dir.path(),
        "q.json",
        r#"{"graph": {"kind": "edges", "n": 2, "edges": [[0, 1]]}, "q": 1.5}"#,
    );
    assert_eq!(lab(&["components", "--config", &bad_q]).status.code(), Some(2));
    // Everything transmits on a connected graph: no world leaves a node inactive.
    let connected = write(
        dir.path(),
        "k.json",
        r#"{"graph": {"kind": "edges", "n": 3, "edges": [[0, 1], [1, 2]]}, "q": 1, "trials": 20}"#,
    );
    let out = lab(&["audit", "--config", &connected]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("x_v = 0"));
}

#[test]
fn disjoint_edges_audit_reports_zero_noise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.json",
        r#"{"graph": {"kind": "edges", "n": 4, "edges": [[0, 1], [2, 3]]}, "q": 1, "trials": 100, "protected": [0, 1, 2, 3]}"#,
    );
    let out = lab(&["audit", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("\nwasserstein_scale,0.000000\n") && text.contains("\nmean_abs_noise,0.000000\n"),
        "{text}"
    );
}

#[test]
fn edge_list_loading_and_dump_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.txt", "# toy\na b\nb a\na a\nb c\n");
    let cfg = write(
        dir.path(),
        "g.json",
        r#"{"graph": {"kind": "edge_list", "path": "g.txt"}}"#,
    );
    let out = lab(&["gen", "--config", &cfg]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dropped 1 repeated edges and 1 self-loops"));
    let dump = String::from_utf8(out.stdout).unwrap();
    assert_eq!(dump, "# nodes=3 edges=2\n0 1\n1 2\n");

    write(dir.path(), "dump.txt", &dump);
    let again = write(
        dir.path(),
        "d.json",
        r#"{"graph": {"kind": "edge_list", "path": "dump.txt"}}"#,
    );
    assert_eq!(
        String::from_utf8(lab(&["gen", "--config", &again]).stdout).unwrap(),
        dump
    );

    write(dir.path(), "broken.txt", "0 1\n1\n");
    let broken = write(
        dir.path(),
        "b.json",
        r#"{"graph": {"kind": "edge_list", "path": "broken.txt"}}"#,
    );
    let out = lab(&["gen", "--config", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.txt:2:"));
}

#[test]
fn generated_graph_dump_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cl.json",
        r#"{"graph": {"kind": "chung_lu", "n": 300, "d": 3, "b": 1.5, "seed": 2}}"#,
    );
    let out_dir = dir.path().join("out");
    assert!(lab(&["gen", "--config", &cfg, "--out", out_dir.to_str().unwrap()])
        .status
        .success());
    let dump = std::fs::read_to_string(out_dir.join("graph.txt")).unwrap();
    let reload = write(
        dir.path(),
        "r.json",
        &format!(
            r#"{{"graph": {{"kind": "edge_list", "path": "{}"}}}}"#,
            out_dir.join("graph.txt").display()
        ),
    );
    assert_eq!(
        String::from_utf8(lab(&["gen", "--config", &reload]).stdout).unwrap(),
        dump
    );
}

#[test]
fn seed_override_changes_results_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"graph": {"kind": "erdos_renyi", "n": 300, "mean_degree": 5, "seed": 1}, "seed": 1}"#,
    );
    let a = lab(&["components", "--config", &cfg, "--trials", "20"]).stdout;
    let b = lab(&["components", "--config", &cfg, "--trials", "20", "--seed", "2"]).stdout;
    let a = String::from_utf8(a).unwrap();
    let b = String::from_utf8(b).unwrap();
    assert_ne!(a.lines().next(), b.lines().next());
    assert_ne!(a.lines().nth(2), b.lines().nth(2));
}
