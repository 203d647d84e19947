use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("shadowlab").chain(args.iter().copied());
    let code = shadowlab::run(argv, &mut out, &mut err);
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn run_json(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn canonical(dir: &TempDir, r: usize, k: usize, c: usize) -> String {
    let path = dir.path().join(format!("canonical_{r}_{k}_{c}.json"));
    let p = path.to_str().unwrap();
    let o = run(&["construct", "--kind", "canonical", "--r", &r.to_string(), "--k", &k.to_string(), "--c", &c.to_string(), "--output", p]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.is_empty());
    p.to_string()
}

#[test]
fn decompose_thirteen() {
    let v = run_json(&["decompose", "--value", "13", "--top-index", "3"]);
    assert_eq!(v["terms"], serde_json::json!([[5, 3], [3, 2]]));
    assert_eq!(v["shift_up"], 6);
    assert_eq!(v["kk_min_b"], 13);
    let big = run_json(&["decompose", "--value", "100000000000000000000000000000", "--top-index", "2"]);
    assert!(big["terms"].as_array().unwrap().len() <= 2);
    assert_eq!(run(&["decompose", "--value", "5", "--top-index", "0"]).code, 2);
}

#[test]
fn colex_rank_and_unrank() {
    let v = run_json(&["colex", "--set", "1,2,4"]);
    assert_eq!(v["rank"], 1);
    let u = run_json(&["colex", "--r", "3", "--rank", "1"]);
    assert_eq!(u["set"], serde_json::json!([1, 2, 4]));
    let seg = run(&["colex", "--r", "4", "--first", "5"]);
    assert_eq!(seg.stdout, "{\"r\": 4, \"sets\": [[1,2,3,4],[1,2,3,5],[1,2,4,5],[1,3,4,5],[2,3,4,5]]}\n");
    assert_eq!(run(&["colex", "--set", "1,1"]).code, 2);
    assert_eq!(run(&["colex", "--r", "3"]).code, 2);
}

#[test]
fn shadow_of_a_segment_and_a_file() {
    let o = run(&["shadow", "--r", "4", "--count", "5"]);
    assert_eq!(o.code, 0);
    let fam: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(fam["sets"].as_array().unwrap().len(), 10);
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", r#"{"r": 4, "sets": [[1,2,3,4]]}"#);
    let o = run(&["shadow", "--input", &f]);
    assert_eq!(o.stdout, "{\"r\": 3, \"sets\": [[1,2,3],[1,2,4],[1,3,4],[2,3,4]]}\n");
}

#[test]
fn construct_writes_valid_configurations() {
    let o = run(&["construct", "--kind", "be", "--r", "5", "--k", "3", "--b", "6"]);
    assert_eq!(o.code, 0);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["k"], 3);
    assert_eq!(v["A"]["sets"].as_array().unwrap().len(), 4);
    assert_eq!(v["B"]["sets"].as_array().unwrap().len(), 6);
    assert_eq!(v["A"]["sets"][0], serde_json::json!([1, 2, 3, 5, 6]));
    assert_eq!(run(&["construct", "--kind", "be", "--r", "3", "--k", "3"]).code, 2);
    assert_eq!(run(&["construct", "--kind", "be", "--r", "3", "--k", "4", "--b", "2"]).code, 2);
}

#[test]
fn validate_pass_and_fail() {
    let dir = TempDir::new().unwrap();
    let c4 = canonical(&dir, 3, 3, 4);
    let v = run_json(&["validate", "--input", &c4]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["min_count"], 3);
    let bad = write(&dir, "bad.json", r#"{"k": 2, "A": {"r": 3, "sets": [[1,2,3]]}, "B": {"r": 2, "sets": [[1,2]]}}"#);
    let o = run(&["validate", "--input", &bad]);
    assert_eq!(o.code, 1);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["violating"], serde_json::json!([[1, 2, 3]]));
    assert!(o.stderr.contains("check failed"));
}

#[test]
fn malformed_input_reports_location() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{\"k\": 3,\n \"A\": {\"r\": 3, \"sets\": [[1,2,3]]},\n \"B\": oops}");
    let o = run(&["analyze", "--input", &bad]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("line 3"), "{}", o.stderr);
    let wrong = write(&dir, "wrong.json", r#"{"k": 3, "A": {"r": 3, "sets": [[1,2,2]]}, "B": {"r": 2, "sets": []}}"#);
    assert_eq!(run(&["validate", "--input", &wrong]).code, 2);
    assert_eq!(run(&["validate", "--input", "/nonexistent/file.json"]).code, 2);
}

#[test]
fn analyze_canonical_and_perturbed() {
    let dir = TempDir::new().unwrap();
    let c4 = canonical(&dir, 3, 3, 4);
    let v = run_json(&["analyze", "--input", &c4]);
    assert_eq!(v["identity"]["lhs"], "30");
    assert_eq!(v["identity"]["rhs"], "30");
    assert_eq!(v["gamma_max"], "0");
    assert_eq!(v["pair_counts"]["p2"], 6);
    for vert in v["vertices"].as_array().unwrap() {
        assert_eq!(vert["octahedra"], 1);
        assert_eq!(vert["s"], 2);
    }
    let minus = write(
        &dir,
        "minus.json",
        r#"{"k": 3, "A": {"r": 3, "sets": [[1,2,3],[1,2,4],[1,3,4]]}, "B": {"r": 2, "sets": [[1,2],[1,3],[2,3],[1,4],[2,4],[3,4]]}}"#,
    );
    let v = run_json(&["analyze", "--input", &minus, "--core"]);
    assert_eq!(v["identity"]["equal"], true);
    assert_eq!(v["epsilon_sums"]["e8"], 6);
    assert_ne!(v["gamma_max"], "0");
    assert_eq!(v["edge_classes"]["nice"], 3);
    let k4 = canonical(&dir, 4, 4, 5);
    assert_eq!(run(&["analyze", "--input", &k4]).code, 2);
}

#[test]
fn entropy_reports_each_length() {
    let dir = TempDir::new().unwrap();
    let c4 = canonical(&dir, 3, 3, 4);
    let v = run_json(&["entropy", "--input", &c4, "--max-len", "2"]);
    let lengths = v["lengths"].as_array().unwrap();
    assert_eq!(lengths.len(), 3);
    assert_eq!(lengths[0]["L"], 6);
    assert_eq!(lengths[1]["L"], 36);
    assert_eq!(lengths[1]["P"], "2/3");
    assert_eq!(lengths[1]["D"], "3.58351893846");
    assert_eq!(lengths[2]["L"], 216);
    assert_eq!(lengths[2]["M"], 24);
    assert_eq!(lengths[2]["P"], "1/9");
    assert_eq!(lengths[2]["bounds"]["nice_pairs"], 6);
    assert_eq!(lengths[2]["bounds"]["per_pair_max"], 4);
    assert!(lengths[3..].is_empty());
    let o = run(&["entropy", "--input", &c4, "--max-len", "6", "--cap", "1000"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("1000"), "{}", o.stderr);
}

#[test]
fn bounds_tables() {
    let rows = run_json(&["bounds", "--k", "3", "--b-min", "6", "--b-max", "10"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["be_lower"], 4);
    assert_eq!(rows[0]["k_specific_upper"], 4);
    assert_eq!(rows[0]["general_leading_status"], "advisory");
    assert_eq!(rows[4]["k_specific_upper"], 10);
    let csv = run(&["bounds", "--k", "2", "--b-min", "5", "--b-max", "5", "--format", "csv"]);
    let lines: Vec<&str> = csv.stdout.lines().collect();
    assert_eq!(lines[0], "b,k,cascade,be_lower,k_specific_upper,general_leading,theorem2_value,gap");
    assert_eq!(lines[1], "5,2,\"binom(5,1)\",10,10,12.5,10,0");
    assert_eq!(run(&["bounds", "--k", "1", "--b-min", "1", "--b-max", "2"]).code, 2);
    assert_eq!(run(&["bounds", "--k", "3", "--b-min", "0", "--b-max", "2"]).code, 2);
}

#[test]
fn solve_and_sweep() {
    let v = run_json(&["solve", "--r", "5", "--k", "4", "--b", "13", "--n", "6"]);
    assert_eq!(v["achieved_a"], 6);
    assert_eq!(v["exhausted"], true);
    assert!(v.get("wall_time").is_none());
    let timed = run_json(&["solve", "--r", "3", "--k", "3", "--b", "3", "--n", "3", "--timing"]);
    assert_eq!(timed["achieved_a"], 1);
    assert!(timed["wall_time"].is_number());
    let h = run_json(&["solve", "--r", "3", "--k", "3", "--b", "6", "--n", "5", "--mode", "heuristic", "--seed", "3"]);
    assert_eq!(h["achieved_a"], 4);
    assert_eq!(h["exhausted"], false);
    let s = run_json(&["sweep", "--r", "3", "--k", "2", "--b", "3", "--n-min", "3", "--n-max", "5"]);
    assert_eq!(s["stable_value"], 3);
    assert_eq!(s["stabilized"], true);
    assert_eq!(run(&["solve", "--r", "3", "--k", "3", "--b", "3", "--n", "3", "--mode", "annealing"]).code, 2);
    assert_eq!(run(&["solve", "--r", "3", "--k", "4", "--b", "3", "--n", "5"]).code, 2);
}

#[test]
fn solve_checkpoint_and_resume() {
    let dir = TempDir::new().unwrap();
    let ck = dir.path().join("run.jsonl");
    let ck = ck.to_str().unwrap();
    let args = ["solve", "--r", "3", "--k", "3", "--b", "10", "--n", "6", "--checkpoint", ck];
    let first = run_json(&args);
    let lines = std::fs::read_to_string(ck).unwrap();
    assert!(lines.lines().all(|l| serde_json::from_str::<Value>(l).unwrap()["status"] == "done"));
    let mut resumed = args.to_vec();
    resumed.push("--resume");
    let second = run_json(&resumed);
    assert_eq!(first["achieved_a"], second["achieved_a"]);
    assert_eq!(first["best_B"], second["best_B"]);
    assert_eq!(run(&["solve", "--r", "3", "--k", "3", "--b", "3", "--n", "3", "--resume"]).code, 2);
}

#[test]
fn help_and_usage_errors() {
    let o = run(&["--help"]);
    assert_eq!(o.code, 0);
    for cmd in ["decompose", "colex", "shadow", "construct", "validate", "analyze", "entropy", "bounds", "solve", "sweep"] {
        assert!(o.stdout.contains(cmd), "missing {cmd}");
        let h = run(&[cmd, "--help"]);
        assert_eq!(h.code, 0, "{cmd}");
        assert!(h.stdout.len() > 100, "{cmd}");
    }
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["decompose", "--value", "x", "--top-index", "2"]).code, 2);
}

#[test]
fn binary_exit_codes_and_budget_env() {
    let bin = env!("CARGO_BIN_EXE_shadowlab");
    let ok = Command::new(bin).args(["decompose", "--value", "13", "--top-index", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let usage = Command::new(bin).arg("nonsense").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let capped = Command::new(bin)
        .args(["solve", "--r", "4", "--k", "3", "--b", "12", "--n", "7"])
        .env("SHADOWLAB_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&capped.stdout).unwrap();
    assert_eq!(v["exhausted"], false);
    assert!(v["nodes_visited"].as_u64().unwrap() <= 5);
    let flag_wins = Command::new(bin)
        .args(["solve", "--r", "3", "--k", "3", "--b", "3", "--n", "4", "--budget", "100000"])
        .env("SHADOWLAB_BUDGET", "1")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&flag_wins.stdout).unwrap();
    assert_eq!(v["exhausted"], true);
}
