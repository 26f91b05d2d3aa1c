use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multinorm")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_spec(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("multinorm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(!text.contains('\r'));
    text.lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn maximum_norm_of_two_point_masses_is_two() {
    let pair = fixture("pair.json");
    let out = run(&["norm", pair.to_str().unwrap(), "--kind", "max"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["value"], 2.0);
    assert_eq!(v["method"], "closed_form");
    assert_eq!(v["gap"], 0.0);
}

#[test]
fn module_identities_verify_on_the_cyclic_group_of_order_three() {
    let out = run(&["module", "verify", "--group", "z3", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for id in v["result"]["identities"].as_array().unwrap() {
        assert!(id["max_residual"].as_f64().unwrap() <= 1e-12, "{id}");
    }
    assert_eq!(v["result"]["retraction_norm"]["upper"], 1.0);
}

#[test]
fn module_demo_runs() {
    let out = run(&["module", "demo"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["r_pi_tilde_x"], serde_json::json!([1.0, 2.0, 3.0]));
}

#[test]
fn weak_norm_with_p_above_q_is_an_input_error() {
    let out = run(&["check", "axioms", "--engine", "weak", "--p", "2", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_flags_print_usage_and_exit_two() {
    let out = run(&["norm", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn violated_bound_exits_one() {
    // |{0,1} + [0,10)| / 10 = 1.1 exceeds 1 * 2^0.
    let out = run(&["folner", "--group", "int", "0,1", "0..10", "--bound", "1", "--q", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["ratio"], 1.1);
}

#[test]
fn integer_scan_follows_the_interval_formula() {
    let spec = write_spec(
        "scan.json",
        r#"{"grid": [{"task": "folner_scan", "group": "int", "ns": [1, 2, 3, 4, 5, 6, 7, 8],
                     "family": {"family": "rectangles", "max_side": 16}},
                    {"task": "folner_scan", "group": "int", "ns": [8],
                     "family": {"family": "rectangles", "max_side": 128}}]}"#,
    );
    let out = run(&["sweep", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows[0].join(","), "task,group,n,p,q,value,lower,upper,gap,method,runtime_ms");
    for row in &rows[1..9] {
        let n: f64 = row[2].parse().unwrap();
        assert_eq!(row[5].parse::<f64>().unwrap(), (n + 15.0) / 16.0);
    }
    let wide: f64 = rows[9][5].parse().unwrap();
    assert_eq!(wide, 135.0 / 128.0);
    assert!(wide < rows[8][5].parse::<f64>().unwrap());
}

#[test]
fn disjoint_translates_sweep_gives_n_to_the_one_over_q() {
    let spec = write_spec(
        "invariance.json",
        r#"{"grid": [{"task": "invariance", "group": "int", "support": "0", "ns": [1, 3, 5], "qs": [1, 2, 3, "inf"]}]}"#,
    );
    let out = run(&["sweep", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for row in &csv_rows(&out)[1..] {
        let n: f64 = row[2].parse().unwrap();
        let expected = if row[4] == "inf" { 1.0 } else { n.powf(1.0 / row[4].parse::<f64>().unwrap()) };
        let got: f64 = row[5].parse().unwrap();
        assert!((got - expected).abs() <= 1e-12 * expected, "{row:?}");
    }
}

#[test]
fn empty_grid_gives_a_header_only_csv() {
    let spec = write_spec("empty.json", r#"{"grid": []}"#);
    let out = run(&["sweep", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "task,group,n,p,q,value,lower,upper,gap,method,runtime_ms\n");
}

#[test]
fn malformed_sweep_is_an_input_error() {
    let spec = write_spec("bad.json", r#"{"grid": [{"task": "folner_scan", "group": "int"}]}"#);
    assert_eq!(run(&["sweep", spec.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_for_a_fixed_seed() {
    let pair = fixture("pair.json");
    let commands: [&[&str]; 3] = [
        &["norm", pair.to_str().unwrap(), "--kind", "dual", "--p", "1", "--q", "2", "--r", "2", "--seed", "5"],
        &["check", "duality", "--trials", "3", "--seed", "5"],
        &["module", "verify", "--group", "s3", "--p", "1.5", "--samples", "10", "--seed", "5"],
    ];
    for args in commands {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn output_file_and_csv_tables() {
    let dir = std::env::temp_dir().join(format!("multinorm-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scan.csv");
    let out = run(&["amen", "scan", "--group", "int", "--ns", "1,2", "--family", "rectangles", "--size", "4", "--q", "2",
        "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("n,family,best_ratio,bound"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn multi_bounded_norm_of_a_rotation_matches_its_operator_norm() {
    let rot = fixture("rotation.json");
    let out = run(&["mbnorm", rot.to_str().unwrap(), "--p", "1", "--q", "2", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["matches_op_norm"], true);
    assert!((v["result"]["op_norm"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn free_group_obstruction_holds() {
    let out = run(&["amen", "obstruct", "--group", "free2", "--support", "ball:1", "--n", "4", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["holds"], true);
}

#[test]
fn guard_overrun_fails_unless_a_heuristic_is_requested() {
    // Four vectors with full support on 13 points: 4^13 = 2^26 assignments.
    let cols: Vec<Vec<f64>> = (0..4).map(|i| (0..13).map(|k| 1.0 + ((i * 13 + k) % 7) as f64).collect()).collect();
    let doc = write_spec("wide.json", &serde_json::json!({ "vectors": cols }).to_string());
    let path = doc.to_str().unwrap();
    assert_eq!(run(&["norm", path, "--kind", "standard", "--p", "1", "--q", "2"]).status.code(), Some(2));
    let out = run(&["norm", path, "--kind", "standard", "--p", "1", "--q", "2", "--mode", "local_search"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["method"], "local_search");
    assert!(v["result"]["lower_bound"].as_f64().unwrap() <= v["result"]["upper_bound"].as_f64().unwrap());
}
