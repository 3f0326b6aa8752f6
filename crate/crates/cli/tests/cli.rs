use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(name: &str) -> String {
    root().join("corpus").join(format!("{name}.loop")).to_string_lossy().into_owned()
}

fn llterm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_llterm")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", stdout(o)))
}

fn assert_schema(schema: &str, v: &Value) {
    let text = std::fs::read_to_string(root().join("docs").join(schema)).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{schema} violations: {errors:?}");
}

#[test]
fn decrement_terminates() {
    let o = llterm(&["analyze", &corpus("decrement")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("TERMINATES"));
}

#[test]
fn increment_has_witness_zero() {
    let o = llterm(&["analyze", &corpus("increment"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["outcome"], "NONTERMINATING");
    assert_eq!(v["witness"], serde_json::json!([0]));
    assert_schema("analyze.schema.json", &v);
}

#[test]
fn simulate_decrement_from_three() {
    let o = llterm(&["simulate", &corpus("decrement"), "--init", "3", "--max-steps", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("exited at 4"), "{}", stdout(&o));
    let v = json_of(&llterm(&["simulate", &corpus("decrement"), "--init", "3", "--format", "json", "--trace"]));
    assert_eq!(v["outcome"]["step"], 4);
    assert_eq!(v["final_state"], serde_json::json!([-1]));
    assert_eq!(v["states"].as_array().unwrap().len(), 5);
    assert_schema("simulate.schema.json", &v);
}

#[test]
fn simulate_box_formats() {
    let o = llterm(&["simulate", &corpus("increment"), "--box", "-5:5", "--max-steps", "50", "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[1], "-5,exited,0,0");
    assert_eq!(lines[11], "5,survived,50,");
    let v = json_of(&llterm(&["simulate", &corpus("rotation"), "--box", "-2:2,-2:2", "--format", "json"]));
    assert_eq!(v.as_array().unwrap().len(), 25);
    assert_schema("simulate.schema.json", &v);
}

#[test]
fn text_and_json_verdicts_agree() {
    for name in ["decrement", "increment", "rotation", "companion", "fibonacci", "race_win", "shear"] {
        let text = llterm(&["analyze", &corpus(name)]);
        let json = llterm(&["analyze", &corpus(name), "--format", "json"]);
        assert_eq!(text.status.code(), json.status.code(), "{name}");
        let v = json_of(&json);
        assert_schema("analyze.schema.json", &v);
        let first = stdout(&text).lines().next().unwrap().to_string();
        assert_eq!(first, format!("verdict: {}", v["outcome"].as_str().unwrap()), "{name}");
    }
}

#[test]
fn spectrum_relations_witness_schemas() {
    let v = json_of(&llterm(&["spectrum", &corpus("companion")]));
    assert_schema("spectrum.schema.json", &v);
    assert_eq!(v["dim"], 3);
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
    let v = json_of(&llterm(&["spectrum", "--matrix", "2,1;0,2"]));
    assert_eq!(v["diagonalisable"], false);
    assert_schema("spectrum.schema.json", &v);

    let v = json_of(&llterm(&["relations", &corpus("companion")]));
    assert_schema("relations.schema.json", &v);
    let v = json_of(&llterm(&["relations", "--tuple", "1,0,1@1;1,1,1@1"]));
    assert_schema("relations.schema.json", &v);
    // i has order 4 and a primitive cube root of unity has order 3
    assert_eq!(v["torus"]["components"], "12");

    let v = json_of(&llterm(&["witness", &corpus("companion_shifted")]));
    assert_schema("witness.schema.json", &v);
    assert_eq!(v["supported"], true);
}

#[test]
fn corpus_report() {
    let dir = std::env::temp_dir().join(format!("llterm-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in ["decrement", "increment", "rotation", "swap_gap"] {
        std::fs::copy(corpus(name), dir.join(format!("{name}.loop"))).unwrap();
    }
    let o = llterm(&["corpus", dir.to_str().unwrap(), "--radius", "5", "--budget", "500", "--format", "json"]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json_of(&o);
    assert_schema("corpus.schema.json", &v);
    assert_eq!(v["loops"], 4);
    assert_eq!(v["contradictions"], 0);
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(llterm(&["analyze", "/nonexistent.loop"]).status.code(), Some(1));
    let dir = std::env::temp_dir().join(format!("llterm-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.loop");
    std::fs::write(&bad, "vars x; while x >= do x := x").unwrap();
    assert_eq!(llterm(&["analyze", bad.to_str().unwrap()]).status.code(), Some(1));
    let o = llterm(&["simulate", &corpus("rotation"), "--init", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "radius_schedule = []").unwrap();
    assert_eq!(llterm(&["--config", cfg.to_str().unwrap(), "analyze", &corpus("decrement")]).status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
    let o = Command::new(env!("CARGO_BIN_EXE_llterm")).args(["analyze", &corpus("decrement")]).env("LLTERM_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_and_threads() {
    let dir = std::env::temp_dir().join(format!("llterm-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("llterm.toml");
    std::fs::write(&cfg, "radius_schedule = [2, 4]\nformat = \"json\"\nthreads = 1\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_llterm"))
        .args(["--config", cfg.to_str().unwrap(), "analyze", &corpus("rotation")])
        .env("LLTERM_THREADS", "1")
        .output()
        .unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_of(&o)["outcome"], "NONTERMINATING");
    let o = llterm(&["analyze", &corpus("rotation"), "--radius-schedule", "2,8", "--m-max", "40"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(llterm(&["analyze", &corpus("rotation"), "--radius-schedule", "8,2"]).status.code(), Some(1));
}
