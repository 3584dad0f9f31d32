use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn boxdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxdim")).args(args).output().expect("runs")
}

fn cert(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("certificate on stdout")
}

fn check<'a>(c: &'a Value, name: &str) -> &'a Value {
    c["checks"].as_array().unwrap().iter().find(|x| x["name"] == name).unwrap()
}

fn frac(v: &Value) -> (i64, i64) {
    (v["num"].as_i64().unwrap(), v["den"].as_i64().unwrap())
}

fn write_demo(dir: &Path) -> String {
    let p = dir.join("cover.json");
    let o = boxdim(&["cover", "synth", "demo", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    p.to_str().unwrap().to_string()
}

#[test]
fn demo_cover_lebesgue_one_and_two() {
    let dir = tempfile::tempdir().unwrap();
    let cover = write_demo(dir.path());
    let o = boxdim(&["cover", "verify", &cover, "--window-radius", "40", "--lebesgue", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(cert(&o)["verdict"], "pass");

    let o = boxdim(&["cover", "verify", &cover, "--window-radius", "40", "--lebesgue", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let c = cert(&o);
    assert_eq!(c["verdict"], "fail");
    let w = &check(&c, "lebesgue_at_R")["witness"];
    assert!(w["failing_points"].as_array().unwrap().contains(&serde_json::json!([8])));
}

#[test]
fn odometer_towers_are_exact() {
    let o = boxdim(&["rokhlin", "odometer", "--group", "z", "--chain", "factorial", "--stage", "3", "--subgroup-stage", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let c = cert(&o);
    assert_eq!(c["claim"], "tower.exact");
    assert_eq!(frac(&c["result"]["measured_eps"]), (0, 1));
    assert_eq!(c["checks"].as_array().unwrap().len(), 4);
}

#[test]
fn perturbed_tower_fails_with_a_point() {
    let o = boxdim(&["rokhlin", "odometer", "--lattice", "24", "--subgroup-lattice", "8", "--perturb", "0,0,0,1/2"]);
    assert_eq!(o.status.code(), Some(1));
    let c = cert(&o);
    let a = check(&c, "3a-sum");
    assert_eq!(a["pass"], false);
    assert!(a["witness"].is_object());
}

#[test]
fn every_fail_carries_a_witness() {
    let runs: [&[&str]; 3] = [
        &["chain", "injective", "--chain", "constant:6", "--last", "3", "--radius", "3"],
        &["cover", "push", "demo", "--lattice", "6"],
        &["chain", "dominates", "--group", "u3", "--chain", "scaled", "--other", "congruence", "--horizon", "3"],
    ];
    for args in runs {
        let o = boxdim(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        let c = cert(&o);
        for k in c["checks"].as_array().unwrap() {
            if k["pass"] == false {
                assert!(k.get("witness").is_some(), "{args:?} {k}");
            }
        }
    }
    let c = cert(&boxdim(runs[0]));
    let w = &check(&c, "injective-radius")["witness"];
    assert_eq!((w["g1"].clone(), w["g2"].clone()), (serde_json::json!([-3]), serde_json::json!([3])));
}

#[test]
fn malformed_files_exit_two_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(
        &p,
        r#"{"group": "z", "period_stage": {"divisors": [8]}, "colors": [[{"points": [[0]]}]]}"#,
    )
    .unwrap();
    let o = boxdim(&["cover", "verify", p.to_str().unwrap(), "--lebesgue", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("scale_R"));

    std::fs::write(&p, r#"{"group": "z", "period_stage": {"divisors": ["x"]}, "scale_R": 1, "colors": []}"#).unwrap();
    let o = boxdim(&["cover", "verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("period_stage.divisors"));

    std::fs::write(&p, "{ not json").unwrap();
    assert_eq!(boxdim(&["cover", "verify", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(boxdim(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(boxdim(&["group", "info", "--group", "q7"]).status.code(), Some(2));
    assert_eq!(boxdim(&["rokhlin", "odometer", "--lattice", "24"]).status.code(), Some(2));
    assert_eq!(boxdim(&["group", "multiply", "--group", "u3", "1,2", "0,0,0"]).status.code(), Some(2));
}

#[test]
fn certificates_replay_from_their_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 5] = [
        &["amdim", "folner", "--lattice", "24", "--j", "8", "--seed", "3"],
        &["amdim", "product", "--lattice", "24"],
        &["marker", "--lattice", "30", "--interval", "4", "--seed", "7"],
        &["growth", "--group", "z2"],
        &["chain", "qdist", "--group", "u3", "--chain", "scaled", "--stage", "1", "1,2,3", "0,1,0"],
    ];
    for args in runs {
        let out = dir.path().join("c.json");
        let mut with_out: Vec<&str> = args.to_vec();
        with_out.extend(["--threads", "2", "--out", out.to_str().unwrap()]);
        let o = boxdim(&with_out);
        assert!(o.status.success(), "{args:?}");
        assert!(o.stdout.is_empty());
        let first = std::fs::read(&out).unwrap();
        let c: Value = serde_json::from_slice(&first).unwrap();
        let argv: Vec<String> = serde_json::from_value(c["inputs"]["argv"].clone()).unwrap();
        let again = Command::new(env!("CARGO_BIN_EXE_boxdim")).args(&argv).output().unwrap();
        assert_eq!(again.stdout, first, "{args:?}");
    }
}

#[test]
fn folner_witness_certificate() {
    let c = cert(&boxdim(&["amdim", "folner", "--lattice", "24", "--j", "8"]));
    assert_eq!(c["verdict"], "pass");
    assert_eq!(c["claim"], "amdim.witness");
    assert_eq!(frac(&c["result"]["claimed_eps"]), (1, 4));
    let (n, d) = frac(&c["result"]["measured_eps"]);
    assert!(4 * n <= d);
}

#[test]
fn synth_output_feeds_decay_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let cover = dir.path().join("s.json");
    let o = boxdim(&["cover", "synth", "simplicial", "--m", "1", "--l", "8", "--out", cover.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let fam = dir.path().join("f.json");
    let o = boxdim(&["decay", "build", cover.to_str().unwrap(), "--window-radius", "40", "--out", fam.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = boxdim(&["decay", "verify", fam.to_str().unwrap(), "--window-radius", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = boxdim(&["decay", "cover", fam.to_str().unwrap(), "--window-radius", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}
