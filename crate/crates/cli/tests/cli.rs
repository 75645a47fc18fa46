use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circle-euler")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn validate_reports_rank() {
    let o = run(&["validate", &scenario("f2_z2.toml")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("|Q| = 2, rank K = 3"), "{}", stdout(&o));
}

#[test]
fn tau_of_a_rotation_is_exact() {
    let o = run(&["tau", "--map", r#"[["0","2/5"]]"#]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("exact 2/5"), "{}", stdout(&o));
}

#[test]
fn tau_of_a_scenario_word() {
    let o = run(&["tau", &scenario("abelian_z2.toml"), "a a"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("exact 1"), "{}", stdout(&o));
}

#[test]
fn chi_prints_both_cocycles() {
    let o = run(&["chi", &scenario("abelian_z2.toml"), "a", "a"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("chi = 0"), "{out}");
    assert!(out.contains("chi_Z = 1"), "{out}");
}

#[test]
fn crossed_hom_table_has_a_row_per_quotient_element() {
    let o = run(&["crossed-hom", &scenario("f2_z2.toml"), "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    let rows = v["crossedHom"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 3));
    assert_eq!(rows[0], serde_json::json!([0, 0, 0]));
    assert_eq!(v["schreier"]["kGenerators"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_passes_with_zero_class() {
    let o = run(&["verify", &scenario("abelian_z2.toml")]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["schemaVersion"], 1);
    assert!(v["h1Class"]["coordinates"].as_array().unwrap().iter().all(|c| c == 0));
    for key in ["scenarioHash", "checks", "crossedHom", "skipped", "elapsed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn verify_is_deterministic() {
    let path = scenario("abelian_z2.toml");
    let a = json(&run(&["verify", &path, "--seed", "5", "--samples", "40"]));
    let b = json(&run(&["verify", &path, "--seed", "5", "--samples", "40"]));
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("elapsed");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(strip(a), strip(b));
}

#[test]
fn verify_writes_the_report_file() {
    let out = std::env::temp_dir().join(format!("circle-euler-report-{}.json", std::process::id()));
    let o = run(&["verify", &scenario("abelian_z2.toml"), "--samples", "20", "--output", &out.display().to_string()]);
    assert!(o.status.success());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["scenarioHash"], json(&o)["scenarioHash"]);
    let _ = std::fs::remove_file(out);
}

#[test]
fn lift_compare_finds_the_coboundary() {
    let o = run(&["lift-compare", &scenario("f2_z2.toml"), "--second", "1,0,-2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["mu"], serde_json::json!([-1, 0, 2]));
    assert_eq!(v["predictedWitness"], serde_json::json!([1, 0, -2]));
}

#[test]
fn bad_scenario_exits_with_two() {
    let dir = std::env::temp_dir().join(format!("circle-euler-bad-{}.toml", std::process::id()));
    std::fs::write(
        &dir,
        "[generators]\na = [[\"0\", \"1/2\"], [\"1/4\", \"0\"]]\n[quotient]\ndegree = 1\na = \"()\"\n",
    )
    .unwrap();
    let o = run(&["validate", &dir.display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let _ = std::fs::remove_file(dir);
    let missing = run(&["verify", "/nonexistent/scenario.toml"]);
    assert_eq!(missing.status.code(), Some(2));
}
