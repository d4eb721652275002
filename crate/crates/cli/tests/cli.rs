use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn centerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_centerlab")).args(args).env_remove("CENTERLAB_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn repro_passes_and_carries_schema() {
    let out = centerlab(&["repro", "ex2.1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["passed"], true);
}

#[test]
fn formats() {
    let csv = centerlab(&["--format", "csv", "repro", "ex2.1"]);
    assert!(String::from_utf8_lossy(&csv.stdout).starts_with("name,expected,computed,tolerance,oracle,passed"));
    let md = centerlab(&["--format", "md", "repro", "ex2.1"]);
    assert!(String::from_utf8_lossy(&md.stdout).contains("verdict: **PASS**"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(centerlab(&["repro", "ex9.9"]).status.code(), Some(1));
    assert_eq!(centerlab(&["--format", "xml", "repro", "ex2.1"]).status.code(), Some(1));
    assert_eq!(centerlab(&["center", "/nonexistent.json"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(centerlab(&["center", &bad]).status.code(), Some(1));
    let old = write(dir.path(), "old.json", r#"{"schema":2,"space":{"kind":"lp","p":1,"dim":1},"points":[[0]],"f":{"kind":"weighted_max","weights":[1]}}"#);
    assert_eq!(centerlab(&["center", &old]).status.code(), Some(1));
    assert_eq!(centerlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn computational_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // x already in Y: no transversal direction to project along
    let inst = write(
        dir.path(),
        "p.json",
        r#"{"schema":1,"space":{"kind":"lp","p":"inf","dim":2},"subspace":{"basis":[[1,0]]},"x":[2,0]}"#,
    );
    assert_eq!(centerlab(&["property", "almost-constrained", &inst]).status.code(), Some(2));
}

#[test]
fn failed_assertion_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut inst: Value = serde_json::from_str(&String::from_utf8(centerlab(&["repro", "ex2.4", "--dump-instance"]).stdout).unwrap()).unwrap();
    inst["radius"] = serde_json::json!(1.4);
    let path = write(dir.path(), "ex.json", &inst.to_string());
    let out = centerlab(&["--trials", "5", "repro", "ex2.4", "--instance", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL norm x - y1"));
}

#[test]
fn dump_instance_round_trips() {
    let out = centerlab(&["repro", "thm2.11", "--dump-instance"]);
    assert_eq!(out.status.code(), Some(0));
    let inst = json(&out);
    assert_eq!(inst["schema"], 1);
    assert_eq!(inst["trials"], 500);
}

#[test]
fn seed_from_environment_and_flag() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_centerlab"));
        c.env_remove("CENTERLAB_SEED");
        if let Some(s) = env {
            c.env("CENTERLAB_SEED", s);
        }
        if let Some(s) = flag {
            c.args(["--seed", s]);
        }
        let out = c.args(["--trials", "5", "repro", "thm2.8"]).output().unwrap();
        json(&out)["data"]["seed"].clone()
    };
    assert_eq!(run(None, None), 11);
    assert_eq!(run(Some("42"), None), 42);
    assert_eq!(run(Some("42"), Some("7")), 7);
}

#[test]
fn identical_runs_give_identical_bodies() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_clock_ms");
        v
    };
    let a = strip(json(&centerlab(&["--seed", "3", "--trials", "20", "repro", "thm2.7"])));
    let b = strip(json(&centerlab(&["--seed", "3", "--trials", "20", "repro", "thm2.7"])));
    assert_eq!(a, b);
}

#[test]
fn center_on_two_points() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "c.json",
        r#"{"schema":1,"space":{"kind":"lp","p":"inf","dim":2},"points":[[0,0],[4,2]],"f":{"kind":"weighted_max","weights":[1,1]}}"#,
    );
    let out_path = dir.path().join("report.json");
    let out = centerlab(&["--out", out_path.to_str().unwrap(), "center", &inst]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(r["data"]["rad"], 2.0);
    assert!(r["data"]["modulus_csv"].as_str().unwrap().starts_with("delta,excess,samples"));
}

#[test]
fn property_counterexample_replays() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "p.json",
        r#"{"schema":1,"space":{"kind":"lp","p":1,"dim":2},"subspace":{"basis":[[1,0]]},
            "families":[[{"center":[1,1],"radius":1},{"center":[-1,1],"radius":1},{"center":[0,1],"radius":1}]]}"#,
    );
    let report = dir.path().join("r.json");
    let out = centerlab(&["--trials", "0", "--out", report.to_str().unwrap(), "property", "mideal", &inst]);
    assert_eq!(out.status.code(), Some(3));
    let replay = centerlab(&["property", "mideal", "--replay", report.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(3));
    let r = json(&replay);
    assert_eq!(r["data"]["counterexample"][0]["center"], serde_json::json!([1.0, 1.0]));

    let whole = write(dir.path(), "w.json", r#"{"schema":1,"space":{"kind":"lp","p":1,"dim":2},"subspace":{"dim":2,"basis":[[1,0],[0,1]]}}"#);
    assert_eq!(centerlab(&["--trials", "20", "property", "central", &whole]).status.code(), Some(0));
}
