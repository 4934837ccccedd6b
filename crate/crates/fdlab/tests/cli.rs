use std::process::{Command, Output};

use serde_json::Value;

fn fdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdlab")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = fdlab(args);
    let v = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (v, out.status.code().unwrap())
}

fn triple(v: &Value) -> [f64; 3] {
    let a = v.as_array().unwrap();
    [0, 1, 2].map(|i| a[i].as_f64().unwrap())
}

#[test]
fn table_matches_golden_file() {
    let out = fdlab(&["table", "--nmax", "8"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), include_str!("golden/table_n8.csv"));
}

#[test]
fn eval_reports_value() {
    let (v, code) = report(&["eval", "--point", "1.2,1.5707963267948966,0.1"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "fdlab.report/1");
    assert_eq!(v["command"], "eval");
    assert_eq!(v["data"]["point"]["region"], "SQUARE");
    let y = triple(&v["data"]["value"]);
    for (a, b) in y.iter().zip([-0.05, 0.05, 0.125]) {
        assert!((a - b).abs() < 1e-12, "{y:?}");
    }
}

#[test]
fn fiber_of_tip_is_figure_eight() {
    let (v, code) = report(&["fiber", "--target=-0.5,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["kind"], "FIGURE_EIGHT");
    assert_eq!(triple(&v["data"]["wedge"]), [0.5, 0.0, 0.0]);
}

#[test]
fn library_errors_exit_one() {
    let (v, code) = report(&["jac", "--point", "1,0.5,0.3"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "SINGULAR_POINT");
    assert!(v["data"].is_null());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(fdlab(&["eval"]).status.code(), Some(2));
    assert_eq!(fdlab(&["eval", "--point", "1,2"]).status.code(), Some(2));
    assert_eq!(fdlab(&["eval", "--point", "1,0.5,0.2", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(fdlab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = fdlab(&["eval", "--point", "0.5,1,0.2", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["data"]["point"]["region"], "SQUARE");
}

#[test]
fn exported_torus_is_closed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.obj");
    let (_, code) = report(&["export-mesh", "--level", "0.5", "--resolution", "32", "--mesh", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let obj = std::fs::read_to_string(path).unwrap();
    let v = obj.lines().filter(|l| l.starts_with("v ")).count();
    let f = obj.lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!((v, f), (32 * 32, 2 * 32 * 32));
}

#[test]
fn exported_image_has_same_faces() {
    let dir = tempfile::tempdir().unwrap();
    let dom = dir.path().join("d.obj");
    let img = dir.path().join("i.obj");
    for (which, p) in [("domain", &dom), ("image", &img)] {
        let (_, code) = report(&["export-mesh", "--level", "2", "--resolution", "16", "--which", which, "--mesh", p.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    let faces = |p: &std::path::Path| -> Vec<String> {
        std::fs::read_to_string(p).unwrap().lines().filter(|l| l.starts_with("f ")).map(String::from).collect()
    };
    assert_eq!(faces(&dom), faces(&img));
}

#[test]
fn degenerate_level_writes_circle() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.obj");
    let (v, code) = report(&["export-mesh", "--level", "0", "--resolution", "16", "--mesh", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "DEGENERATE_LEVEL");
    let obj = std::fs::read_to_string(path).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 16);
    assert!(obj.lines().any(|l| l.starts_with("l ")));
}

#[test]
fn verify_all_is_deterministic() {
    let args = ["verify-all", "--only", "5,12,14", "--seed", "7"];
    let a = fdlab(&args);
    let b = fdlab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
}
