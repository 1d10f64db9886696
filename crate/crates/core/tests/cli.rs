use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use homfly::link::LinkDiagram;
use serde_json::Value;

const FIGURE_EIGHT_PD: &str = "X[4,2,5,1], X[8,6,1,5], X[6,3,7,4], X[2,7,3,8]";

fn homfly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homfly")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn corpus(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(sub)
}

#[test]
fn compute_figure_eight_with_both() {
    let o = homfly(&["compute", "--algorithm", "both", FIGURE_EIGHT_PD]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "a^2 + a^-2 - z^2 - 1");

    let file = corpus("fixtures").join("figure_eight.json");
    let o = homfly(&["compute", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "a^2 + a^-2 - z^2 - 1");
}

#[test]
fn stats_carry_the_documented_fields() {
    let o = homfly(&["compute", FIGURE_EIGHT_PD, "--stats", "--output", "json", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["rendered"], "a^2 + a^-2 - z^2 - 1");
    let s = &v["stats"];
    for key in ["width", "bags", "peak_configs", "total_configs", "leaves_visited", "wall_ms"] {
        assert!(s.get(key).is_some(), "missing {key}");
    }
    assert_eq!(s["leaves_visited"], 4);

    let o = homfly(&["compute", FIGURE_EIGHT_PD, "--stats", "--algorithm", "fpt", "--threads", "2"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let s: Value = serde_json::from_str(lines[1]).unwrap();
    assert!(s["leaves_visited"].is_null());
    assert!(s["width"].as_i64().unwrap() >= 1);
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.pd");
    fs::write(&empty, "").unwrap();
    let o = homfly(&["compute", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!stderr(&o).is_empty());

    let o = homfly(&["compute", "X[1,5,2,4], X[3,1,4,6], X[5,3,6,9]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NonQuadrivalent"), "{}", stderr(&o));

    let o = homfly(&["compute", "--algorithm", "nope", FIGURE_EIGHT_PD]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn width_budget_exits_3() {
    let o = homfly(&["compute", "--algorithm", "fpt", "--width-budget", "1", FIGURE_EIGHT_PD]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("WidthBudgetExceeded"));
}

#[test]
fn compute_checks_an_embedded_expected_value() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value =
        serde_json::from_str(&fs::read_to_string(corpus("fixtures").join("trefoil_right.json")).unwrap()).unwrap();
    v["homfly"] = serde_json::json!([[0, 0, "1"]]);
    let path = dir.path().join("wrong.json");
    fs::write(&path, v.to_string()).unwrap();
    let o = homfly(&["compute", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn gen_is_deterministic_and_sized() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let o = homfly(&[
            "gen",
            "--strands",
            "2",
            "--length",
            "3",
            "--count",
            "1",
            "--seed",
            "1",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let files = |d: &Path| {
        let mut v: Vec<_> = fs::read_dir(d).unwrap().map(|e| e.unwrap().path()).collect();
        v.sort();
        v
    };
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert_eq!(fa.len(), 1);
    let text = fs::read(&fa[0]).unwrap();
    assert_eq!(text, fs::read(&fb[0]).unwrap());
    let d = LinkDiagram::from_json_str(std::str::from_utf8(&text).unwrap()).unwrap();
    assert_eq!(d.crossing_count(), 3);
}

#[test]
fn gen_hundred_valid_diagrams() {
    let dir = tempfile::tempdir().unwrap();
    let o = homfly(&[
        "gen",
        "--strands",
        "5",
        "--length",
        "10",
        "--count",
        "100",
        "--seed",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut n = 0;
    for e in fs::read_dir(dir.path()).unwrap() {
        let d = LinkDiagram::from_json_str(&fs::read_to_string(e.unwrap().path()).unwrap()).unwrap();
        assert_eq!(d.crossing_count(), 10);
        assert_eq!(d.arc_count(), 20);
        assert!(d.is_planar());
        n += 1;
    }
    assert_eq!(n, 100);
}

#[test]
fn gen_rejects_bad_parameters() {
    for args in [
        ["--strands", "1", "--length", "3", "--count", "1"],
        ["--strands", "3", "--length", "0", "--count", "1"],
        ["--strands", "3", "--length", "2", "--count", "0"],
    ] {
        let dir = tempfile::tempdir().unwrap();
        let mut full = vec!["gen"];
        full.extend(args);
        full.extend(["--out", dir.path().to_str().unwrap()]);
        assert_eq!(homfly(&full).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_fixture_corpus() {
    let o = homfly(&["verify", corpus("fixtures").to_str().unwrap(), "--output", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["all_equal"], true);
    assert_eq!(v["checked"], v["with_expected"]);
    let names: Vec<&str> = v["files"].as_array().unwrap().iter().map(|f| f["file"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn verify_shipped_random_corpus() {
    let o = homfly(&["verify", corpus("random").to_str().unwrap(), "--threads", "4", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["checked"].as_u64().unwrap() >= 500);
    assert_eq!(v["checked"], v["with_expected"]);
}

#[test]
fn verify_max_crossings_skips() {
    let o = homfly(&["verify", corpus("fixtures").to_str().unwrap(), "--max-crossings", "3", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["skipped"].as_u64().unwrap() > 0);
}

#[test]
fn verify_corrupted_expected_value_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["figure_eight.json", "hopf_pos.json", "trefoil_left.json"] {
        fs::copy(corpus("fixtures").join(name), dir.path().join(name)).unwrap();
    }
    let path = dir.path().join("hopf_pos.json");
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    v["homfly"][0][2] = Value::String("7".into());
    fs::write(&path, v.to_string()).unwrap();
    let o = homfly(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let err = stderr(&o);
    assert!(err.contains("hopf_pos.json") && err.contains("computed") && err.contains("expected"), "{err}");
}

#[test]
fn verify_empty_corpus_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = homfly(&["verify", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("0 checked"));
}

#[test]
fn td_stats_reports_a_nice_decomposition() {
    let o = homfly(&["td-stats", FIGURE_EIGHT_PD, "--heuristic", "min-fill", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["crossings"], 4);
    assert!(v["width"].as_i64().unwrap() >= 1);
    assert!(v["decomposition"].is_object() || v["decomposition"].is_array());
}
