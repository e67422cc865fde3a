use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fracfib(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracfib"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON record per line"))
        .collect()
}

fn items(out: &Output) -> Vec<Value> {
    json_lines(out)
        .into_iter()
        .filter(|v| v["kind"] == "item")
        .collect()
}

#[test]
fn ab_routes_agree() {
    let out = fracfib(&["--json", "ab", "3", "1", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let item = &items(&out)[0];
    assert_eq!(item["computed"]["snf"], 13);
    assert_eq!(item["computed"]["formula"], 13);
    assert_eq!(item["computed"]["circulant"], 13);

    let out = fracfib(&["--json", "ab", "9", "3", "1"]);
    assert_eq!(items(&out)[0]["computed"]["snf"], 46764);
    let out = fracfib(&["--json", "ab", "2", "1", "1"]);
    assert_eq!(items(&out)[0]["computed"]["snf"], 1);
}

#[test]
fn table_and_json_carry_the_same_data() {
    let json = fracfib(&["--json", "vseq", "5", "1", "1"]);
    let table = fracfib(&["vseq", "5", "1", "1"]);
    assert_eq!(json.status.code(), table.status.code());
    let table = String::from_utf8(table.stdout).unwrap();
    let records = items(&json);
    let values: Vec<i64> = records.iter().map(|r| r["computed"].as_i64().unwrap()).collect();
    assert_eq!(values, [1, 3, 4, 7, 11]);
    let rows: Vec<&str> = table.lines().skip(1).collect();
    for (r, row) in records.iter().zip(&rows) {
        let cells: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(cells[0], r["status"].as_str().unwrap());
        assert_eq!(cells[1], r["name"].as_str().unwrap());
        assert_eq!(cells[2], r["inputs"].to_string());
        assert_eq!(cells[3], r["expected"].to_string());
        assert_eq!(cells[4], r["computed"].to_string());
    }
    let summary = json_lines(&json).pop().unwrap();
    assert_eq!(summary["kind"], "summary");
    assert!(rows.last().unwrap().contains(&format!("pass: {}", summary["pass"])));
}

#[test]
fn enumerate_builtin_families() {
    for (args, order) in [
        (vec!["F", "3", "3", "2"], 504),
        (vec!["F", "3", "1", "3"], 3584),
        (vec!["F", "3", "1", "3", "7"], 56),
        (vec!["F", "3", "1", "1", "--omega", "4"], 8),
        (vec!["E", "3", "1", "1"], 24),
    ] {
        let mut full = vec!["--json", "enumerate"];
        full.extend(args.iter().copied());
        let out = fracfib(&full);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(items(&out)[0]["computed"], order, "{args:?}");
    }
}

#[test]
fn enumerate_overflow_is_inconclusive() {
    let out = fracfib(&["--json", "enumerate", "F", "3", "3", "1", "--max-cosets", "50"]);
    assert_eq!(out.status.code(), Some(2));
    let item = &items(&out)[0];
    assert_eq!(item["status"], "inconclusive");
    assert_eq!(item["computed"]["overflow"], 50);
}

#[test]
fn enumerate_file_with_subgroup_and_emit() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s3.pres");
    std::fs::write(&file, "# S_3\n< a, b | a^2, b^3, a b a b >\n").unwrap();
    let emit = dir.path().join("table.json");
    let out = fracfib(&[
        "--json",
        "enumerate",
        file.to_str().unwrap(),
        "--subgroup",
        "a",
        "--strategy",
        "felsch",
        "--emit",
        emit.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(items(&out)[0]["computed"], 3);
    let table: Value = serde_json::from_str(&std::fs::read_to_string(&emit).unwrap()).unwrap();
    assert!(table.to_string().contains('3'));

    let out = fracfib(&["--json", "enumerate", file.to_str().unwrap()]);
    assert_eq!(items(&out)[0]["computed"], 6);
}

#[test]
fn bad_inputs_are_errors() {
    let out = fracfib(&["enumerate", "/nonexistent/file.pres"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reading"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.pres");
    std::fs::write(&file, "< a | b >").unwrap();
    let out = fracfib(&["enumerate", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown generator"));
}

#[test]
fn analyze_quaternion_group() {
    let out = fracfib(&["--json", "analyze", "F", "3", "1", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let records = items(&out);
    let fp = &records[1]["computed"];
    assert_eq!(fp["order"], 8);
    assert_eq!(fp["involution_count"], 1);
    assert_eq!(fp["derived_order"], 2);
    let w = records.iter().find(|r| r["name"] == "order of w(n,k)").unwrap();
    assert_eq!(w["computed"], 2);
}

#[test]
fn certify_emit_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = fracfib(&[
        "--json",
        "certify",
        "3",
        "2",
        "3",
        "--which",
        "commutator",
        "--emit",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(items(&out)[0]["computed"]["valid"], true);

    let out = fracfib(&["--json", "certify", "--check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert["family"], serde_json::json!({ "n": 3, "k": 2, "l": 3 }));
    cert["moves"].as_array_mut().unwrap().pop();
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, cert.to_string()).unwrap();
    let out = fracfib(&["--json", "certify", "--check", tampered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(items(&out)[0]["computed"]["valid"], false);
}

#[test]
fn certify_rejects_even_n() {
    let out = fracfib(&["certify", "4", "1", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn certify_square_nine() {
    let out = fracfib(&["--json", "certify", "9", "1", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn low_index_finds_infinite_abelianisation() {
    let out = fracfib(&["--json", "low-index", "F", "5", "2", "3", "--omega", "6", "--max-index", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(items(&out)
        .iter()
        .any(|r| r["computed"]["index"] == 5 && r["computed"]["free_rank"].as_u64() >= Some(1)));
}

#[test]
fn sweeps_pass_with_small_bounds() {
    let out = fracfib(&["--json", "sweep", "all", "--max-n", "9", "--max-kl", "4", "--exec", "sequential"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(items(&out).len(), 7);
    let out = fracfib(&["sweep", "nonsense"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reproduce_subset() {
    let out = fracfib(&["--json", "reproduce-paper", "--only", "V_9"]);
    assert_eq!(out.status.code(), Some(0));
    let records = items(&out);
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["computed"], 46764);
}

#[test]
fn reproduce_everything() {
    let out = fracfib(&["--json", "reproduce-paper"]);
    let failed: Vec<Value> = items(&out).into_iter().filter(|r| r["status"] != "pass").collect();
    assert!(failed.is_empty(), "{failed:#?}");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn emit_to_missing_directory_fails() {
    let out = fracfib(&["certify", "3", "1", "1", "--emit", "/nonexistent/dir/c.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!Path::new("/nonexistent/dir/c.json").exists());
}

#[test]
fn usage_errors_exit_with_one() {
    let out = fracfib(&["ab", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fracfib(&["--help"]).status.code(), Some(0));
}

#[test]
fn negative_parameters_are_normalised() {
    let out = fracfib(&["--json", "enumerate", "F", "3", "-1", "1", "--omega", "4"]);
    assert_eq!(items(&out)[0]["computed"], 8);
    let out = fracfib(&["--json", "ab", "3", "-1", "-2"]);
    assert_eq!(items(&out)[0]["computed"]["snf"], 13);
}
