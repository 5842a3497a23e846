use std::process::{Command, Output};

use preproj::algebra::AlgebraDocument;
use serde_json::Value;

fn preproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_preproj")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = preproj(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn quiver_info() {
    assert!(stdout(&preproj(&["quiver-info", "--type", "A2"])).contains("h = 3"));
    let d4 = json(&["quiver-info", "--type", "D4"]);
    assert_eq!(d4["coxeter"]["h"], 6);
    assert_eq!(d4["coxeter"]["nu"], serde_json::json!([0, 1, 2, 3]));
    let a1 = preproj(&["quiver-info", "--type", "A1"]);
    assert_eq!(a1.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&a1.stderr).contains("not supported"));
}

#[test]
fn algebra_documents_round_trip() {
    for (ty, dim) in [("A2", 4), ("A3", 10)] {
        let v = json(&["algebra", "--type", ty]);
        let doc: AlgebraDocument = serde_json::from_value(v.clone()).unwrap();
        assert_eq!(doc.basis.len(), dim);
        assert_eq!(serde_json::to_value(&doc).unwrap(), v);
    }
    assert!(stdout(&preproj(&["algebra", "--type", "A2"])).contains("dim A = 4"));
}

#[test]
fn hh_tables() {
    let v = json(&["hh", "--type", "A2", "--max-degree", "6"]);
    let dims = |key: &str, n: usize| v[key][n]["dims"].as_array().unwrap().clone();
    assert_eq!(v["homology"][0]["dim"], 2);
    assert_eq!(v["cohomology"][1]["dim"], 1);
    let h = v["h"].as_i64().unwrap();
    for d in dims("homology", 4) {
        let deg = d[0].as_i64().unwrap();
        assert!((h + 1..=2 * h - 2).contains(&deg));
    }
}

#[test]
fn eval_cells() {
    let run = |args: &[&str]| stdout(&preproj(args)).trim().to_string();
    assert_eq!(run(&["eval", "iota", "z[0,0]", "omega[1,3]", "--coxeter", "4"]), "omega[1,3]");
    assert_eq!(run(&["eval", "bracket", "z[0,0]", "z[1,0]", "--type", "A3"]), "0");
    assert_eq!(run(&["eval", "lie", "theta[0,0]", "f[2,1]", "--coxeter", "4"]), "8*f[2,1]");
    assert_eq!(run(&["eval", "connes", "psi[0,1]", "--coxeter", "4"]), "7*zeta[0,1]");
    let engine = run(&["eval", "lie", "theta[0,0]", "zeta[0,0]", "--type", "A2", "--meta", "engine"]);
    assert_eq!(engine, "2*zeta[0,0]");
    assert_eq!(preproj(&["eval", "iota", "z[0,0]"]).status.code(), Some(2));
    assert_eq!(preproj(&["eval", "iota", "q[0,0]", "z[0,0]", "--coxeter", "4"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let ok = preproj(&["verify", "--type", "A2", "--max-degree", "8"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("0 failed"));

    let shallow = json(&["verify", "--type", "A2", "--max-degree", "2"]);
    let skipped = shallow["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "skipped").count();
    assert!(skipped > 0);

    let bad = preproj(&["verify", "--type", "A2", "--max-degree", "6", "--inject-fault", "bracket-sign", "--format", "json"]);
    assert_eq!(bad.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&bad.stdout).unwrap();
    let witnesses: usize = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["witnesses"].as_array().unwrap().len())
        .sum();
    assert!(witnesses > 0);
}

#[test]
fn config_file_and_flags() {
    let dir = std::env::temp_dir().join(format!("preproj-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let conf = dir.join("run.conf");
    let out = dir.join("hh.json");
    std::fs::write(&conf, "type = A2\nmax-degree = 3\nformat = json\n").unwrap();
    let o = preproj(&["hh", "--config", conf.to_str().unwrap(), "--max-degree", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["max_degree"], 5);
    assert_eq!(v["cohomology"].as_array().unwrap().len(), 5);

    std::fs::write(&conf, "colour = blue\n").unwrap();
    assert_eq!(preproj(&["hh", "--config", conf.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(preproj(&["hh", "--type", "A2", "--max-degree", "1"]).status.code(), Some(2));
    assert_eq!(preproj(&["no-such-command"]).status.code(), Some(2));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn output_is_deterministic() {
    let a = preproj(&["hh", "--type", "A3", "--max-degree", "5", "--format", "json"]);
    let b = preproj(&["hh", "--type", "A3", "--max-degree", "5", "--format", "json", "--threads", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let c = preproj(&["verify", "--type", "A2", "--max-degree", "6", "--format", "json", "--threads", "3"]);
    let d = preproj(&["verify", "--type", "A2", "--max-degree", "6", "--format", "json"]);
    assert_eq!(c.stdout, d.stdout);
}
