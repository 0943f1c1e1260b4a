use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pgnl(args: &[&str]) -> Output {
    pgnl_env(args, &[])
}

fn pgnl_env(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pgnl"));
    cmd.args(args).env_remove("PGNL_CACHE_DIR");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(o)))
}

fn assert_schema(name: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{v}");
}

#[test]
fn truant_command() {
    let o = pgnl(&["truant", "P3+P3", "--cap", "100"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_eq!(v, serde_json::json!({ "truant": 5 }));
    assert_schema("truant.schema.json", &v);

    let o = pgnl(&["truant", "P3+P3+P3", "--cap", "3000"]);
    let v = json_out(&o);
    assert_eq!(v, serde_json::json!({ "candidate_universal_up_to": 3000 }));
    assert_schema("truant.schema.json", &v);

    assert_eq!(code(&pgnl(&["truant", "P3+", "--cap", "10"])), 2);
    assert_eq!(code(&pgnl(&["truant", "P2", "--cap", "10"])), 2);
    assert_eq!(code(&pgnl(&["truant", "P3", "--cap", "0"])), 3);
    assert_eq!(code(&pgnl(&["truant", "P3", "--bogus"])), 2);
}

#[test]
fn truant_formats() {
    let o = pgnl(&["truant", "P7 + 2*P5", "--cap", "100", "--format", "csv"]);
    assert_eq!(stdout(&o), "sum,truant,status\nP7+2*P5,12,truant\n");
    let o = pgnl(&["truant", "P5+3*P5", "--format", "text"]);
    assert_eq!(stdout(&o).trim(), "P5+3*P5: truant 9");
}

#[test]
fn tree_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tree.json");
    let o = pgnl(&["tree", "--lcm-bound", "1", "--cap", "1000", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_schema("tree-report.schema.json", &v);
    assert_eq!(v["gamma"], 8);
    assert_eq!(v["complete"], true);
    let dump: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_schema("tree-dump.schema.json", &dump);
    assert_eq!(dump["truant"], 1);
    assert_eq!(dump["children"][0]["sum"], serde_json::json!([[1, 3]]));

    let o = pgnl(&["tree", "--lcm-bound", "3", "--cap", "50", "--depth-limit", "3"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_schema("tree-report.schema.json", &v);
    assert_eq!(v["complete"], false);

    assert_eq!(code(&pgnl(&["tree", "--lcm-bound", "1", "--min-polygon", "5"])), 3);
    assert_eq!(
        code(&pgnl(&["tree", "--lcm-bound", "30", "--cap", "200", "--budget", "10"])),
        5
    );
}

#[test]
fn tree_restricted_to_triangles_and_squares() {
    let o = pgnl(&[
        "tree", "--lcm-bound", "2", "--depth-limit", "2", "--cap", "100", "--format", "csv",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let depth2: Vec<&str> = text.lines().filter(|l| l.starts_with("2,")).collect();
    for (sum, t) in [("P3+P3", "5"), ("P3+P4", "8"), ("P4+P4", "3"), ("P3+2*P3", "4"), ("P4+2*P4", "5")] {
        assert!(
            depth2.contains(&format!("2,{sum},{t},truant").as_str()),
            "{sum} missing from {depth2:?}"
        );
    }
}

#[test]
fn table2_command() {
    let o = pgnl(&["table2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "MATCH (60 finite cells + 24 tail cells)");

    let o = pgnl(&["table2", "--format", "json"]);
    let v = json_out(&o);
    assert_schema("table2.schema.json", &v);
    assert_eq!(v["match"], true);

    let o = pgnl(&["table2", "--format", "csv"]);
    assert!(stdout(&o).contains("\n1,5,5,11,11\n"));

    let o = pgnl(&["table2", "--inject-fault"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("DIFF a2=1 m1=3 m2=3: computed 6, expected 5"));

    let o = pgnl(&["table2", "--cap", "15"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap below max table value 20"));
}

#[test]
fn density_command() {
    let o = pgnl(&["density", "P4+P4+P4+P4", "-n", "1", "-p", "3", "--check", "--explain"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_schema("density.schema.json", &v);
    assert_eq!(v["oracle_match"], true);
    assert_eq!(v["beta"], v["oracle"]);
    assert!(!v["assembled_terms"].as_array().unwrap().is_empty());

    let o = pgnl(&["density", "P3+2*P5+P7", "-n", "4", "-p", "2", "--check"]);
    assert_eq!(code(&o), 0);
    assert_schema("density.schema.json", &json_out(&o));

    assert_eq!(code(&pgnl(&["density", "P4+P4+P4+P4", "-n", "1", "-p", "4"])), 2);
}

#[test]
fn eisenstein_command() {
    let o = pgnl(&["eisenstein", "P3+P3+P3+P3+P3", "-n", "10", "--cutoff", "100"]);
    assert_eq!(code(&o), 0);
    let v = json_out(&o);
    assert_schema("eisenstein.schema.json", &v);
    let lo = v["eisenstein"][0].as_f64().unwrap();
    let hi = v["eisenstein"][1].as_f64().unwrap();
    assert!(lo > 0.0 && lo <= hi);

    let wide = json_out(&pgnl(&["eisenstein", "P3+P3+P3+P3+P3", "-n", "10", "--cutoff", "20"]));
    assert!(wide["eisenstein"][0].as_f64().unwrap() <= lo);
    assert!(wide["eisenstein"][1].as_f64().unwrap() >= hi);

    assert_eq!(code(&pgnl(&["eisenstein", "P4+P4+P4+P4", "-n", "3"])), 3);
}

fn scan_to(path: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["scan", "--depth", "3", "--bounds", "12,12,12", "--cap", "600"];
    args.extend_from_slice(extra);
    args.push("--out");
    args.push(path.to_str().unwrap());
    pgnl(&args)
}

#[test]
fn scan_streams_csv() {
    let o = pgnl(&["scan", "--depth", "3", "--bounds", "10,10,10", "--cap", "3000"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a1,m1,a2,m2,a3,m3,truant,status"));
    assert!(text.contains("\n1,3,1,3,1,3,,candidate_universal\n"));
    let max = text
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').nth(6).and_then(|t| t.parse::<u64>().ok()))
        .max()
        .unwrap();
    assert!(max <= 644);

    let o = pgnl(&["scan", "--depth", "3", "--bounds", "10,10,10", "--cap", "3000", "--format", "json"]);
    let v = json_out(&o);
    assert_schema("scan-report.schema.json", &v);
    assert_eq!(v["max_finite_truant"].as_u64(), Some(max));

    let o = pgnl(&["scan", "--depth", "4", "--bounds", "5,5,5,5", "--cap", "500", "--format", "json"]);
    let v = json_out(&o);
    assert_schema("scan-report.schema.json", &v);
    assert!(v["parent_universal"].as_u64().unwrap() > 0);
}

#[test]
fn scan_argument_errors() {
    assert_eq!(code(&pgnl(&["scan", "--depth", "3", "--bounds", "10,10"])), 2);
    assert_eq!(code(&pgnl(&["scan", "--depth", "5", "--bounds", "10,10,10,10,10"])), 2);
    assert_eq!(code(&pgnl(&["scan", "--depth", "3", "--bounds", "10,2,10"])), 3);
    let o = pgnl(&["scan", "--depth", "3", "--bounds", "20,20,20", "--budget", "1000", "--format", "json"]);
    assert_eq!(code(&o), 5);
}

#[test]
fn scan_resume_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    assert_eq!(code(&scan_to(&full, &[])), 0);
    let bytes = fs::read(&full).unwrap();
    assert!(bytes.len() > 10_000);

    // cut mid-row, at a row boundary, and inside the header
    for cut in [7_777, bytes.len() / 2, 20] {
        let partial = dir.path().join(format!("partial-{cut}.csv"));
        fs::write(&partial, &bytes[..cut]).unwrap();
        let o = pgnl(&[
            "scan", "--depth", "3", "--bounds", "12,12,12", "--cap", "600", "--resume",
            partial.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(fs::read(&partial).unwrap(), bytes, "cut at {cut}");
    }

    // a budget-interrupted run can be finished by resuming
    let partial = dir.path().join("budget.csv");
    let o = scan_to(&partial, &["--budget", "2000"]);
    assert_eq!(code(&o), 5);
    let path = partial.to_str().unwrap();
    let resume = ["scan", "--depth", "3", "--bounds", "12,12,12", "--cap", "600", "--resume", path, "--format", "json"];
    let o = pgnl(&resume);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(&partial).unwrap(), bytes);
    let v = json_out(&o);
    let rows = bytes.iter().filter(|&&b| b == b'\n').count() as u64 - 1;
    assert_eq!(v["rows"].as_u64(), Some(rows));

    let wrong = dir.path().join("wrong.csv");
    fs::write(&wrong, "x,y\n").unwrap();
    let o = pgnl(&["scan", "--depth", "3", "--bounds", "5,5,5", "--resume", wrong.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_corpus_command() {
    let o = pgnl(&["verify-corpus", "--cap", "10000"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "197/197 pass (cap 10000)");

    // every genuinely universal sum passes a tiny cap
    assert_eq!(code(&pgnl(&["verify-corpus", "--cap", "3"])), 0);

    let dir = tempfile::tempdir().unwrap();
    let mixed = dir.path().join("mixed.txt");
    fs::write(&mixed, "P3+P3+P3\nP3+P3  # not universal\nP4+P4+P4\n").unwrap();
    let o = pgnl(&["verify-corpus", "--cap", "100", "--corpus", mixed.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v = json_out(&o);
    assert_schema("verify-corpus.schema.json", &v);
    assert_eq!(v["passed"], 1);
    assert_eq!(
        v["failures"],
        serde_json::json!([{ "sum": "P3+P3", "first_gap": 5 }, { "sum": "P4+P4+P4", "first_gap": 7 }])
    );
    let o = pgnl(&["verify-corpus", "--cap", "100", "--corpus", mixed.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("FAIL P3+P3: first gap 5\nFAIL P4+P4+P4: first gap 7\n1/3 pass"));

    let o = pgnl(&["verify-corpus", "--corpus", "/nonexistent/corpus.txt"]);
    assert_eq!(code(&o), 4);

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "P3+P3+P3\nP3+*\n").unwrap();
    assert_eq!(code(&pgnl(&["verify-corpus", "--corpus", bad.to_str().unwrap()])), 2);
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = pgnl_env(&["truant", "P3+P3", "--cap", "100"], &[("PGNL_CACHE_DIR", dir.path())]);
    assert_eq!(json_out(&o)["truant"], 5);
    let bytes = fs::read(dir.path().join("values.pgnl")).unwrap();
    assert_eq!(&bytes[..5], b"PGNL1");

    // a second run reads the cache and agrees
    let o = pgnl_env(&["truant", "P3+P3", "--cap", "100"], &[("PGNL_CACHE_DIR", dir.path())]);
    assert_eq!(json_out(&o)["truant"], 5);

    let other = tempfile::tempdir().unwrap();
    let o = pgnl_env(
        &["truant", "P4+P4", "--cap", "50", "--cache-dir", other.path().to_str().unwrap()],
        &[("PGNL_CACHE_DIR", dir.path())],
    );
    assert_eq!(json_out(&o)["truant"], 3);
    assert!(other.path().join("values.pgnl").exists());
}

#[test]
fn sequential_flag_gives_identical_scan() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(code(&scan_to(&a, &[])), 0);
    assert_eq!(code(&scan_to(&b, &["--sequential", "--workers", "1"])), 0);
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}
