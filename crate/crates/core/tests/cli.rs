//! End-to-end runs of the `motifclust` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_motifclust"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

/// Two triangles joined by the bridge 2–3; external ids are sparse.
const BOWTIE: &str = "# two triangles\n10\t20\n20\t30\n10\t30\n30\t40\n40\t50\n50\t60\n40\t60\n";

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.txt"), BOWTIE).unwrap();
    dir
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = workspace();
    let out = run(dir.path(), &["count", "--edges", "g.txt", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_is_an_input_error() {
    let dir = workspace();
    let out = run(dir.path(), &["count", "--edges", "nope.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_edge_list_is_an_input_error() {
    let dir = workspace();
    fs::write(dir.path().join("bad.txt"), "1\t2\nx y\n").unwrap();
    let out = run(dir.path(), &["count", "--edges", "bad.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn count_writes_per_edge_triangles_in_external_ids() {
    let dir = workspace();
    let out = run(dir.path(), &["count", "--edges", "g.txt", "--out", "t.tsv"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("t.tsv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.contains(&"10\t20\t1"));
    assert!(rows.contains(&"30\t40\t0"));
    assert!(dir.path().join("t.tsv.manifest.json").exists());
}

#[test]
fn conductance_reports_exact_ratios() {
    let dir = workspace();
    fs::write(dir.path().join("s.txt"), "10 20 30\n").unwrap();
    let out = run(dir.path(), &["conductance", "--edges", "g.txt", "--subset", "s.txt", "--out", "c.tsv"]);
    let text = fs::read_to_string(dir.path().join("c.tsv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("phi2\t1\t7\t1/7"), "{text}");
    assert!(lines[1].starts_with("phi3\t0\t3\t0"), "{text}");
    // Neither side holds a 4-clique, so φ4 is reported as degenerate.
    assert!(lines[2].starts_with('#'), "{text}");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn degenerate_subset_exits_with_code_three() {
    let dir = workspace();
    fs::write(dir.path().join("s.txt"), "10 20 30\n").unwrap();
    let out = run(
        dir.path(),
        &["conductance", "--edges", "g.txt", "--subset", "s.txt", "--measure", "phi4"],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with('#'));
}

#[test]
fn spectral_on_disconnected_triangle_graph_exits_with_code_three() {
    let dir = workspace();
    let out = run(dir.path(), &["spectral", "--edges", "g.txt", "--out", "cut.tsv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn cluster_splits_the_bowtie() {
    let dir = workspace();
    let out = run(
        dir.path(),
        &["cluster", "--edges", "g.txt", "--out", "c.tsv", "--histogram", "h.csv"],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("c.tsv")).unwrap();
    let labels: Vec<(u64, usize)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split('\t');
            (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
        })
        .collect();
    assert_eq!(labels, vec![(10, 0), (20, 0), (30, 0), (40, 1), (50, 1), (60, 1)]);
    let hist = fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert!(hist.contains("3,2"), "{hist}");
}

#[test]
fn invalid_theta_is_an_input_error() {
    let dir = workspace();
    let out = run(dir.path(), &["cluster", "--edges", "g.txt", "--out", "c.tsv", "--theta=0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_scores_against_communities() {
    let dir = workspace();
    fs::write(dir.path().join("truth.txt"), "10\t20\t30\n40\t50\t60\n").unwrap();
    let out = run(
        dir.path(),
        &["eval", "--edges", "g.txt", "--communities", "truth.txt", "--out", "pr.csv", "--summary", "pr.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("pr.csv")).unwrap();
    assert!(csv.starts_with("community_id,size,cluster,intersection,precision,recall\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("pr.json")).unwrap()).unwrap();
    assert_eq!(summary["p"], 100.0);
    assert_eq!(summary["r"], 100.0);
}

#[test]
fn synth_manifest_records_seed_and_digest() {
    let dir = workspace();
    let out = run(dir.path(), &["synth", "gnp", "--n", "30", "--p", "0.2", "--seed", "4", "--out", "g30.txt"]);
    assert!(out.status.success());
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g30.txt.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seeds"], serde_json::json!([4]));
    assert_eq!(m["subcommand"], "synth gnp");
    let text = fs::read_to_string(dir.path().join("g30.txt")).unwrap();
    assert!(text.starts_with("# Nodes: "));
}

#[test]
fn thread_count_does_not_change_walk_estimates() {
    let dir = workspace();
    let planted = ["synth", "planted", "--n", "20", "--k", "2", "--p", "0.6", "--q", "0.1", "--seed", "1", "--out", "pp.txt", "--labels", "pp.lab"];
    assert!(run(dir.path(), &planted).status.success());
    let walk = |threads: &str, out: &str| {
        let args = ["--threads", threads, "walk", "--edges", "pp.txt", "--labels", "pp.lab", "--kind", "biased", "--trials", "200000", "--seed", "3", "--out", out];
        assert!(run(dir.path(), &args).status.success());
        fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(walk("1", "a.json"), walk("4", "b.json"));
}
