use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpxeq"))
        .args(args)
        .env_remove("MPXEQ_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error(out: &Output, exit: i32) -> Value {
    assert_eq!(out.status.code(), Some(exit), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty(), "partial output on failure");
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON error object")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn solve_benchmark() {
    let v = json(&run(&["solve", &fixture("benchmark.json")]));
    let r = &v["result"]["equilibrium"];
    assert_eq!(f(&r["prices"][0]), 1.0);
    assert_eq!(f(&r["prices"][1]), 1.0);
    assert!((f(&r["allocation"][0][0]) - 0.78).abs() < 1e-12);
    assert!((f(&r["allocation"][1][0]) - 0.78).abs() < 1e-12);
    assert_eq!(v["result"]["verification"]["passed"], true);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["economy_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn welfare_example_one_is_inefficient() {
    let v = json(&run(&["welfare", &fixture("example1.json")]));
    assert_eq!(v["result"]["verdict"]["parallel"]["parallel"], false);
    assert_eq!(v["result"]["improvement_available"], true);
    let imp = json(&run(&["improve", &fixture("example1.json")]));
    let gains = imp["result"]["gains"].as_array().unwrap();
    assert!(gains.iter().all(|g| f(g) > 0.0));
}

#[test]
fn compstat_transfer_sign() {
    let out = run(&[
        "compstat",
        &fixture("example5.json"),
        "--perturbation",
        &fixture("t32_good2.json"),
        "--fd-step",
        "1e-5",
    ]);
    let v = json(&out);
    assert_eq!(v["result"]["price_signs"][1], "-");
    assert!(f(&v["result"]["finite_differences"]["price"][1]) < 0.0);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    for args in [
        vec!["solve", "benchmark.json"],
        vec!["welfare", "example5.json"],
        vec!["oracle", "example5.json", "--seed", "3"],
    ] {
        let path = fixture(args[1]);
        let mut a = args.clone();
        a[1] = &path;
        let first = run(&a);
        let second = run(&a);
        assert!(first.status.success());
        assert_eq!(first.stdout, second.stdout);
    }
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("mpxeq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cru.json");
    let out = run(&["cru", &fixture("example5.json"), "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert!(f(&v["result"]["cru"]) < 1.0);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes_and_error_objects() {
    let e = error(&run(&["solve", &fixture("corner.json")]), 2);
    assert_eq!(e["code"], "NonInteriorEquilibrium");
    assert_eq!(e["location"], "allocation[1][0]");

    let e = error(&run(&["validate", &fixture("self_link.json")]), 1);
    assert_eq!(e["code"], "ValidationError");
    assert_eq!(e["location"], "goods[0].network[0][0]");

    let e = error(&run(&["solve", &fixture("missing.json")]), 1);
    assert_eq!(e["code"], "IoError");

    let e = error(&run(&["improve", &fixture("benchmark.json")]), 2);
    assert_eq!(e["code"], "ParallelNoImprovement");

    let e = error(
        &run(&["compstat", &fixture("benchmark.json"), "--perturbation", &fixture("t32_good2.json")]),
        1,
    );
    assert_eq!(e["code"], "ValidationError");

    let e = error(&run(&["curves", "--example", "I", "--phi", "1.5"]), 1);
    assert_eq!(e["code"], "DomainError");

    let e = error(&run(&["frobnicate"]), 1);
    assert_eq!(e["code"], "UsageError");
}

#[test]
fn curves_csv() {
    let out = run(&["curves", "--example", "I", "--phi", "0.7", "--points", "11", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y_equilibrium,y_contract");
    assert_eq!(lines.len(), 12);
    let last: Vec<f64> = lines[11].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(last, vec![2.0, 2.0, 2.0]);
}

#[test]
fn flat_csv_report() {
    let out = run(&["solve", &fixture("benchmark.json"), "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("path,value\n"));
    assert!(text.contains("result.equilibrium.prices[1],1.0000000000000000e0\n"));
}

#[test]
fn lindahl_and_validate() {
    let v = json(&run(&["lindahl", &fixture("benchmark.json"), "--compare"]));
    assert_eq!(v["result"]["dominance"], "equal");
    let v = json(&run(&["validate", &fixture("example5.json")]));
    assert_eq!(v["result"]["assumptions"]["rank_condition"], true);
    let v = json(&run(&["centrality", &fixture("example5.json")]));
    let c = f(&v["result"]["layers"][1]["influence"][2]);
    assert!((c - 3.1737).abs() < 1e-4);
}

#[test]
fn seed_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_mpxeq"))
        .args(["oracle", &fixture("example5.json"), "--seed", "1"])
        .env("MPXEQ_SEED", "42")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["seed"], 42);
    assert!(v["result"]["tatonnement"]["closed_form_gap"].as_f64().unwrap() < 1e-6);
    for check in v["result"]["finite_differences"].as_array().unwrap() {
        for field in ["price", "welfare", "consumption"] {
            assert!(f(&check["errors"][field]) < 1e-4);
        }
    }
}
