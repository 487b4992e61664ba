use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn too_many_demos_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = lpp(&["demos", "--game", "nim", "--demos", "12", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let out = lpp(&["train", "--game", "nim", "--epsilon", "1.5", "--out", p(&dir.path().join("m.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = lpp(&["demos", "--game", "go", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_inputs_are_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "[]").unwrap();
    let out = lpp(&["stats", p(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    let out = lpp(&["eval", "--mixture", p(&dir.path().join("missing.json")), "--game", "nim"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_fixture_directory_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_lpp"))
        .args(["demos", "--game", "chase", "--demos", "1", "--out", p(&dir.path().join("d"))])
        .env("LPP_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn demos_are_byte_identical_for_a_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        json(&lpp(&["demos", "--game", "checkmate_tactic", "--demos", "3", "--seed", "4", "--out", p(d.path())]));
    }
    for i in 0..3 {
        let name = format!("demo_{i:02}.json");
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn train_eval_stats_render_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let demos = dir.path().join("demos");
    json(&lpp(&["demos", "--game", "nim", "--out", p(&demos)]));
    let mut args = vec!["train", "--game", "nim", "--budget", "100"];
    let files: Vec<String> = (0..11).map(|i| p(&demos.join(format!("demo_{i:02}.json"))).to_string()).collect();
    for f in &files {
        args.push("--demo-file");
        args.push(f);
    }
    let mixture = dir.path().join("nim.json");
    let m = p(&mixture).to_string();
    args.extend(["--out", &m]);
    let meta = json(&lpp(&args));
    assert_eq!(meta["train_success"], 1.0);
    assert!(dir.path().join("nim.meta.json").exists());

    let trace = dir.path().join("trace");
    let e1 = json(&lpp(&["eval", "--mixture", &m, "--game", "nim", "--trace", p(&trace)]));
    let e2 = json(&lpp(&["eval", "--mixture", &m, "--game", "nim"]));
    assert_eq!(e1, e2);
    assert_eq!(e1["mean_success"], 1.0);
    assert_eq!(e1["successes"].as_array().unwrap().len(), 9);

    let stats = json(&lpp(&["stats", &m]));
    assert!(stats["programs"].as_u64().unwrap() >= 1);
    assert!(stats["depth"].as_u64().unwrap() >= 2);

    let t = trace.join("test_00.json");
    let traj: Value = serde_json::from_str(&fs::read_to_string(&t).unwrap()).unwrap();
    let steps = traj["steps"].as_array().unwrap().len();
    let out = lpp(&["render", p(&t)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim_end().split("\n\n").count(), steps + 1);
}

#[test]
fn render_grid_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("g.json");
    fs::write(&f, r#"{"height":2,"width":2,"cells":[["empty","token"],["token","empty"]]}"#).unwrap();
    let out = lpp(&["render", p(&f)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), ".I\nI.\n");
}

#[test]
fn experiment_writes_csv_summary_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let run = || {
        let out = lpp(&[
            "experiment", "demo_sweep", "--game", "nim", "--demo-counts", "1,2", "--trials", "2", "--out", p(&csv),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read_to_string(&csv).unwrap()
    };
    let first = run();
    assert_eq!(first.lines().count(), 1 + 4);
    assert!(first.starts_with("game,method,demos,budget,trial,epsilon,mean_success"));
    assert_eq!(first, run());
    assert!(dir.path().join("sweep.summary.csv").exists());
    assert!(dir.path().join("sweep.timing.json").exists());
    let out = lpp(&["experiment", "noise", "--game", "chase", "--noise", "correlated", "--out", p(&csv)]);
    assert_eq!(out.status.code(), Some(2));
}
