use std::process::{Command, Output};

use serde_json::Value;

fn grandnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grandnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = grandnorm(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("grandnorm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn lebesgue_norm_of_constant_is_one() {
    let v = json(&[
        "norm",
        "lebesgue",
        "--space",
        "dyadic:4",
        "--exponent",
        "const:3",
    ]);
    assert_eq!(v["command"], "norm lebesgue");
    assert!((v["result"]["norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["config"].get("grid").is_none());
}

#[test]
fn grand_report_carries_full_profile() {
    let v = json(&[
        "norm",
        "grand",
        "--space",
        "dyadic:5",
        "--function",
        "power:0.25",
        "--grid",
        "16",
    ]);
    let profile = v["result"]["profile"].as_array().unwrap();
    assert_eq!(profile.len(), 16);
    let max = profile
        .iter()
        .map(|pt| pt["value"].as_f64().unwrap())
        .fold(0.0, f64::max);
    assert_eq!(v["result"]["norm"].as_f64().unwrap(), max);
}

#[test]
fn morrey_equivalent_and_embedding_reports() {
    let base = [
        "--space",
        "dyadic:4",
        "--exponent",
        "affine:2,1",
        "--lambda",
        "const:0.4",
        "--function",
        "power:0.3",
    ];
    let m = json(&[&["norm", "morrey"][..], &base].concat());
    assert!(m["result"]["norm"].as_f64().unwrap() > 0.0);
    let e = json(&[&["norm", "equivalent", "--grid", "8"][..], &base].concat());
    assert!(e["result"]["ratio"].as_f64().unwrap() >= 1.0 - 1e-12);
    let c = json(
        &[
            &["norm", "embedding", "--grid", "8", "--c", "0.5"][..],
            &base,
        ]
        .concat(),
    );
    assert_eq!(c["result"]["c"].as_f64().unwrap(), 0.5);
    assert_eq!(c["result"]["left_holds"], true);
    assert_eq!(c["result"]["right_holds"], true);
}

#[test]
fn csv_projection_via_out_alias_and_format() {
    let args = [
        "norm",
        "lebesgue",
        "--space",
        "dyadic:3",
        "--function",
        "affine:1,1",
    ];
    let a = grandnorm(&[&args[..], &["--out", "csv"]].concat());
    let b = grandnorm(&[&args[..], &["--format", "csv"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("path,value\n"));
    assert!(text.lines().any(|l| l.starts_with("result.norm,")));
}

#[test]
fn report_written_to_file() {
    let path = tmp("report.json");
    let out = grandnorm(&[
        "norm",
        "lebesgue",
        "--space",
        "dyadic:3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["n"], 8);
}

#[test]
fn generated_file_matches_generator_spec() {
    let path = tmp("space.txt");
    let out = grandnorm(&[
        "generate",
        "--space",
        "graded:5",
        "--exponent",
        "affine:2,0.5",
        "--function",
        "power:0.4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let file = path.to_str().unwrap();
    let from_file = json(&[
        "norm",
        "grand",
        "--space",
        file,
        "--exponent",
        file,
        "--function",
        file,
        "--grid",
        "8",
    ]);
    let from_spec = json(&[
        "norm",
        "grand",
        "--space",
        "graded:5",
        "--exponent",
        "affine:2,0.5",
        "--function",
        "power:0.4",
        "--grid",
        "8",
    ]);
    assert_eq!(from_file["result"], from_spec["result"]);
}

#[test]
fn input_errors_exit_with_two() {
    for args in [
        &["norm", "lebesgue", "--space", "/nonexistent/space.txt"][..],
        &[
            "norm",
            "lebesgue",
            "--space",
            "dyadic:3",
            "--exponent",
            "const:0.5",
        ],
        &["norm", "grand", "--space", "dyadic:3", "--theta", "0"],
        &["norm", "lebesgue", "--space", "dyadic:3", "--no-such-flag"],
        &["verify", "no-such-suite", "--instances", "1"],
        &["diag", "density", "--family", "cantor", "--levels", "3..4"],
    ] {
        let out = grandnorm(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn malformed_space_file_reports_line() {
    let path = tmp("bad.txt");
    std::fs::write(
        &path,
        "[meta]\nn = 2\n[weights]\n0.5 oops\n[coords]\n0\n1\n",
    )
    .unwrap();
    let out = grandnorm(&["norm", "lebesgue", "--space", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn verify_list_and_single_suite() {
    let list = json(&["verify", "--list"]);
    let names: Vec<&str> = list
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"norm-modular") && names.contains(&"pairing-bound"));
    assert!(list
        .as_array()
        .unwrap()
        .iter()
        .all(|s| !s["anchor"].as_str().unwrap().is_empty()));
    let ledger = json(&["verify", "holder", "--seed", "7", "--instances", "50"]);
    assert_eq!(ledger["suites"].as_array().unwrap().len(), 1);
    assert_eq!(ledger["passed"], true);
}

#[test]
fn verify_is_seed_deterministic_and_thread_independent() {
    let run = |threads: &str, seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_grandnorm"))
            .args(["verify", "all", "--seed", seed, "--instances", "40"])
            .env("GRANDNORM_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1", "5");
    let b = run("4", "5");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run("1", "6").stdout);
}

#[test]
fn density_diagnostic_verdicts() {
    let v = json(&[
        "diag",
        "density",
        "--levels",
        "6..9",
        "--witness",
        "const:1",
        "--no-regularity-check",
    ]);
    assert_eq!(v["result"]["tail"]["verdict"], "VANISHES");
    assert_eq!(v["result"]["small_c"]["verdict"], "VANISHES");
    assert_eq!(v["result"]["levels"].as_array().unwrap().len(), 4);
    assert!(v["result"]["regularity"].is_null());
    let s = json(&[
        "diag",
        "density",
        "--family",
        "dyadic:[0,1]",
        "--levels",
        "8..10",
        "--witness",
        "power:0.5",
    ]);
    assert_eq!(s["result"]["tail"]["verdict"], "PERSISTS");
    assert_eq!(s["result"]["agree"], true);
    assert!(s["result"]["regularity"]["doubling"].as_f64().unwrap() >= 1.0);
}

#[test]
fn regularity_report() {
    let v = json(&[
        "diag",
        "regularity",
        "--space",
        "dyadic:6",
        "--exponent",
        "jump:0.5,2,3",
    ]);
    assert!(v["result"]["log_holder"].as_f64().unwrap() > 1.0);
    assert_eq!(v["result"]["quasi_triangle"].as_f64().unwrap(), 1.0);
    assert!(v["result"]["diening"]["oscillation"].as_f64().unwrap() > 1.0);
}

#[test]
fn predual_subcommands() {
    let base = [
        "--space",
        "graded:6",
        "--function",
        "power:0.5",
        "--grid",
        "dyadic:8",
        "--a",
        "0.5",
    ];
    let l = json(&[&["predual", "scriptL"][..], &base].concat());
    assert_eq!(l["command"], "predual scriptL");
    assert_eq!(l["result"]["profile"].as_array().unwrap().len(), 9);
    let h = json(&[&["predual", "hnorm"][..], &base].concat());
    assert_eq!(h["result"]["sandwich"], true);
    let p = json(&[&["predual", "pair", "--block", "affine:1,-1"][..], &base].concat());
    assert_eq!(p["result"]["check"]["holds"], true);
    assert_eq!(p["result"]["blocks"][0]["certified"], true);
    let s = json(&[&["predual", "split", "--kappa", "0.3"][..], &base].concat());
    assert_eq!(s["result"]["regrouped"]["reconstruction_exact"], true);
    assert!(s["result"]["regrouped"]["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b["certified"] == true));
}

#[test]
fn predual_negative_theta_and_exhaustion() {
    let v = json(&[
        "predual",
        "scriptL",
        "--space",
        "halfline:2,3",
        "--function",
        "const:1",
        "--theta",
        "-1",
        "--exhaustion",
        "0..3",
    ]);
    let levels = v["result"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 4);
    let norms: Vec<f64> = levels
        .iter()
        .map(|l| l["result"]["norm"].as_f64().unwrap())
        .collect();
    assert!(norms.windows(2).all(|w| w[1] >= w[0]), "{norms:?}");
}
