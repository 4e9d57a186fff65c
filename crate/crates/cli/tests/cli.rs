use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn sbrw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbrw"))
        .args(args)
        .env_remove("SBRW_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn betti_of_the_torus() {
    let out = sbrw(&["betti", "--complex", &fixture("torus7.json"), "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), serde_json::json!({ "betti": 2 }));
    let all = stdout_json(&sbrw(&["betti", "--complex", &fixture("hollow_tetrahedron.json")]));
    assert_eq!(all["betti"], serde_json::json!([0, 0, 1]));
}

#[test]
fn density_has_atom_line() {
    let out = sbrw(&["arboreal", "density", "--d", "2", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["x", "rho"]);
    assert_eq!(rows.last().unwrap(), &["atom", "1", "0.333333333333"]);
    assert_eq!(rows.len(), 202);
    for r in &rows[1..201] {
        assert!(r[1].parse::<f64>().unwrap() >= 0.0);
    }
    let none = csv_rows(&sbrw(&["arboreal", "density", "--d", "2", "--k", "4", "--points", "5"]));
    assert!(none.iter().all(|r| r[0] != "atom"));
}

#[test]
fn usage_errors_exit_two() {
    let out = sbrw(&["betti", "--complex", &fixture("torus7.json"), "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(sbrw(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sbrw(&["arboreal", "density", "--d", "two", "--k", "2"]).status.code(), Some(2));
    assert_eq!(sbrw(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_input_exits_one_with_structured_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"maximal_faces\": [[0, 0, 1]]}").unwrap();
    let out = sbrw(&["betti", "--complex", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].as_str().unwrap().contains("more than once"));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(sbrw(&["betti", "--complex", bad.to_str().unwrap()]).status.code(), Some(1));
    let out = sbrw(&["limit", "--complex", &fixture("triangle.json"), "--p", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn heat_kernel_target_value() {
    let out = sbrw(&["heat-kernel", "--complex", &fixture("triangle.json"), "--p", "0.5", "--n", "5", "--from", "0,1"]);
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["n", "sigma", "sigma_prime", "value"]);
    assert!(rows.contains(&vec!["5".into(), "0 1".into(), "0 1".into(), "0.65625".into()]));
    let flipped = csv_rows(&sbrw(&[
        "heat-kernel", "--complex", &fixture("triangle.json"), "--p", "0.5", "--n", "5", "--from", "1,0",
    ]));
    assert!(flipped.contains(&vec!["5".into(), "1 0".into(), "0 1".into(), "-0.65625".into()]));
}

#[test]
fn simulation_is_deterministic_across_jobs_and_env() {
    let tri = fixture("triangle.json");
    let base = ["simulate", "--complex", tri.as_str(), "--p", "0.5", "--n", "5", "--runs", "64"];
    let one = sbrw(&[&base[..], &["--seed", "11", "--jobs", "1"]].concat());
    let four = sbrw(&[&base[..], &["--seed", "11", "--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_sbrw")).args(base).env("SBRW_SEED", "11").output().unwrap();
    assert_eq!(one.stdout, env.stdout);
    let other = sbrw(&[&base[..], &["--seed", "12"]].concat());
    assert_ne!(one.stdout, other.stdout);
    let rows = csv_rows(&one);
    assert_eq!(rows[0], ["run", "n", "cell", "sign", "D_value"]);
    assert_eq!(rows.len(), 1 + 64 * 6 * 3);
}

#[test]
fn simulation_mean_matches_exact_kernel() {
    let out = sbrw(&[
        "simulate", "--complex", &fixture("triangle.json"), "--p", "0.5", "--n", "5", "--runs", "4000", "--seed", "5",
        "--jobs", "2",
    ]);
    let samples: Vec<f64> = csv_rows(&out)
        .iter()
        .skip(1)
        .filter(|r| r[1] == "5" && r[2] == "0 1")
        .map(|r| r[4].parse().unwrap())
        .collect();
    assert_eq!(samples.len(), 4000);
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    assert!((mean - 0.65625).abs() <= 4.0 * (var / n).sqrt(), "mean {mean}");
}

#[test]
fn absorbing_and_ancestry_runs() {
    let tri = fixture("two_triangles.json");
    let out = sbrw(&[
        "simulate", "--complex", &tri, "--p", "0.3", "--n", "4", "--runs", "5", "--absorb", "0,1", "--absorb", "2,3",
        "--ancestry", "--start", "2,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    assert!(rows.contains(&vec!["0".into(), "0".into(), "1 2".into(), "1".into(), "-1".into()]));
    let lower = sbrw(&["simulate", "--complex", &tri, "--p", "0.5", "--n", "3", "--lower", "--start", "0,1,2"]);
    assert_eq!(lower.status.code(), Some(0));
    assert_eq!(csv_rows(&lower).len(), 1 + 4 * 2);
}

#[test]
fn dirichlet_solve_and_degenerate_witness() {
    let tri = fixture("triangle.json");
    let out = sbrw(&["dirichlet", "solve", "--complex", &tri, "--boundary", &fixture("two_edges.json"), "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "solved");
    let interior = v["solution"].as_array().unwrap().iter().find(|r| r["cell"] == serde_json::json!([0, 2])).unwrap();
    // F([2,0]) = −(f([0,1]) + f([1,2]))
    assert!((interior["value"].as_f64().unwrap() - 3.0).abs() < 1e-10);
    assert!(v["residual"].as_f64().unwrap() <= 1e-9);

    let out = sbrw(&["dirichlet", "solve", "--complex", &tri, "--boundary", &fixture("one_edge.json")]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "degenerate");
    assert_eq!(v["invertibility"]["witness"].as_array().unwrap().len(), 3);
    assert!(v["invertibility"]["witness_coboundary_norm"].as_f64().unwrap() < 1e-9);

    let diag = stdout_json(&sbrw(&["dirichlet", "diagnose", "--complex", &tri, "--boundary", &fixture("two_edges.json")]));
    assert_eq!(diag["exhaustive"], true);
    assert_eq!(diag["invertibility"]["invertible"], true);
    assert!(diag["open_hinge"].is_null());
}

#[test]
fn series_and_recurrence_reports() {
    let tet = fixture("hollow_tetrahedron.json");
    let v = stdout_json(&sbrw(&["series-check", "--complex", &tet, "--p", "0.3", "--n", "20"]));
    assert!(v["identity_residual"].as_f64().unwrap() <= 1e-9);
    assert!(v["convolution_residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["g"].as_array().unwrap().len(), 21);
    let r = stdout_json(&sbrw(&["recurrence", "--complex", &fixture("triangle.json"), "--p", "0.5", "--n", "100"]));
    assert_eq!(r["recurrent"], true);
    assert!((r["atom_at_one"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
    let fv = csv_rows(&sbrw(&[
        "first-visit", "--complex", &fixture("triangle.json"), "--p", "0", "--n", "3", "--target", "0,1",
    ]));
    assert_eq!(fv.len(), 1 + 4 * 3);
}

#[test]
fn arboreal_reports() {
    let m = csv_rows(&sbrw(&["arboreal", "moments", "--d", "2", "--k", "3", "--order", "8"]));
    for r in &m[1..] {
        assert!(r[3].parse::<f64>().unwrap() < 1e-6);
    }
    let short = sbrw(&["arboreal", "moments", "--d", "2", "--k", "3", "--order", "8", "--radius", "2"]);
    assert_eq!(short.status.code(), Some(1));
    let c = stdout_json(&sbrw(&["arboreal", "classify", "--d", "2", "--k", "4"]));
    assert_eq!(c["class"], "transient");
    let c = stdout_json(&sbrw(&["arboreal", "classify", "--d", "2", "--k", "3"]));
    assert_eq!(c["class"], "recurrent");
    let last = c["cut_integrals"].as_array().unwrap().last().unwrap()[1].as_f64().unwrap();
    assert!(last > 1e3);
    let g = csv_rows(&sbrw(&["arboreal", "gfun", "--d", "2", "--k", "2", "--order", "6", "--radius", "4"]));
    assert_eq!(g[0], ["n", "u", "f", "g", "closed_form", "truncation"]);
    for r in &g[1..] {
        let (a, b, c) = (r[3].parse::<f64>().unwrap(), r[4].parse::<f64>().unwrap(), r[5].parse::<f64>().unwrap());
        assert!((a - b).abs() < 1e-9 && (a - c).abs() < 1e-12);
    }
}

#[test]
fn lower_reports() {
    let v = stdout_json(&sbrw(&["lower", "check", "--complex", &fixture("two_triangles.json"), "--p", "0.5"]));
    assert_eq!(v["max_lower_degree"], 2);
    assert!(v["equivalence_deviation"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["consistent"], true);
    let k = csv_rows(&sbrw(&["lower", "kernel", "--complex", &fixture("triangle.json"), "--p", "0.5", "--n", "3"]));
    assert_eq!(k.last().unwrap(), &["3", "0 1 2", "0 1 2", "0.125"]);
}

#[test]
fn manifest_reproduces_output_digest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim.csv");
    let run = |manifest: &str| {
        let m = dir.path().join(manifest);
        let status = sbrw(&[
            "simulate", "--complex", &fixture("triangle.json"), "--runs", "10", "--n", "3", "--seed", "9", "--out",
            out.to_str().unwrap(), "--manifest", m.to_str().unwrap(),
        ]);
        assert_eq!(status.status.code(), Some(0));
        assert!(status.stdout.is_empty());
        let v: Value = serde_json::from_slice(&std::fs::read(m).unwrap()).unwrap();
        v
    };
    let a = run("a.json");
    let b = run("b.json");
    assert_eq!(a["output_sha256"], b["output_sha256"]);
    assert_eq!(a["seed"], 9);
    let bytes = std::fs::read(&out).unwrap();
    let digest = {
        use sha2::Digest;
        format!("{:x}", sha2::Sha256::digest(&bytes))
    };
    assert_eq!(a["output_sha256"], digest.as_str());
}

#[test]
fn complex_round_trip_is_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let messy = dir.path().join("messy.json");
    std::fs::write(&messy, r#"{"maximal_faces": [[2, 1, 3], [1, 2], [0, 2, 1], [3]]}"#).unwrap();
    let manifest = |input: &std::path::Path, name: &str| {
        let m = dir.path().join(name);
        sbrw(&["betti", "--complex", input.to_str().unwrap(), "--manifest", m.to_str().unwrap()]);
        let v: Value = serde_json::from_slice(&std::fs::read(m).unwrap()).unwrap();
        v["canonical_complex"].as_str().unwrap().to_string()
    };
    let first = manifest(&messy, "m1.json");
    assert_eq!(first, r#"{"maximal_faces":[[0,1,2],[1,2,3]]}"#);
    let clean = dir.path().join("clean.json");
    std::fs::write(&clean, &first).unwrap();
    assert_eq!(manifest(&clean, "m2.json"), first);
}
