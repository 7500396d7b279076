use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn vorpca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vorpca"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad json {text:?}: {e}"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn collinear(dir: &TempDir) -> std::path::PathBuf {
    let path = dir.path().join("collinear.csv");
    std::fs::write(&path, "1,0\n2,0\n3,0\n0,5\n").unwrap();
    path
}

fn gen(dir: &TempDir, name: &str, sigma: &str, gamma: &str, seed: &str) -> (std::path::PathBuf, Output) {
    let csv = dir.path().join(name);
    let out = vorpca(&[
        "gen", "--n", "20", "--d", "3", "--r", "1", "--k", "2", "--sigma", sigma, "--gamma", gamma,
        "--seed", seed, "--output", p(&csv),
    ]);
    (csv, out)
}

#[test]
fn gen_writes_csv_and_sidecar() {
    let dir = TempDir::new().unwrap();
    let (csv, out) = gen(&dir, "inst.csv", "0", "5", "7");
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 20);
    assert!(text.lines().all(|l| l.split(',').count() == 3));
    let sidecar: Value =
        serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(sidecar["true_outliers"].as_array().unwrap().len(), 2);
    assert_eq!(sidecar["true_basis"].as_array().unwrap().len(), 3);
    assert_eq!(sidecar["seed"], 7);
}

#[test]
fn gen_is_byte_identical_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let (a, out_a) = gen(&dir, "a.csv", "0.05", "4", "11");
    let (b, out_b) = gen(&dir, "b.csv", "0.05", "4", "11");
    assert_eq!(out_a.stdout, out_b.stdout);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(a.with_extension("json")).unwrap(),
        std::fs::read(b.with_extension("json")).unwrap()
    );
}

#[test]
fn gen_rejects_small_gamma() {
    let dir = TempDir::new().unwrap();
    let (_, out) = gen(&dir, "bad.csv", "0", "0.5", "1");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_solvers_on_collinear_points() {
    let dir = TempDir::new().unwrap();
    let csv = collinear(&dir);
    let mut results = Vec::new();
    for method in ["brute", "voronoi2d"] {
        let out = vorpca(&["solve", "--input", p(&csv), "--r", "1", "--k", "1", "--method", method]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["outliers"], serde_json::json!([3]));
        assert!(v["loss"].as_f64().unwrap().abs() < 1e-24);
        results.push(v);
    }
    assert_eq!(results[0]["loss"], results[1]["loss"]);
}

#[test]
fn randomized_never_beats_brute_force() {
    let dir = TempDir::new().unwrap();
    let (csv, _) = gen(&dir, "inst.csv", "0.1", "3", "5");
    let brute = json(&vorpca(&["solve", "--input", p(&csv), "--r", "1", "--k", "2", "--method", "brute"]));
    let rand = json(&vorpca(&[
        "solve", "--input", p(&csv), "--r", "1", "--k", "2", "--method", "randomized", "--T", "64",
        "--seed", "3",
    ]));
    let (b, r) = (brute["loss"].as_f64().unwrap(), rand["loss"].as_f64().unwrap());
    assert!(r >= b * (1.0 - 1e-12), "{r} < {b}");
    assert_eq!(rand["seed"], 3);
    assert_eq!(rand["samples_used"], 64);
}

#[test]
fn sampled_methods_need_a_sample_count() {
    let dir = TempDir::new().unwrap();
    let csv = collinear(&dir);
    let out = vorpca(&["solve", "--input", p(&csv), "--r", "1", "--k", "1", "--method", "randomized"]);
    assert_eq!(out.status.code(), Some(2));
    let out = vorpca(&[
        "solve", "--input", p(&csv), "--r", "1", "--k", "1", "--method", "voronoi-sampled", "--alpha",
        "0.1", "--seed", "1",
    ]);
    assert!(out.status.success());
    assert_eq!(json(&out)["samples_used"], 4);
}

#[test]
fn brute_force_budget_exceeded() {
    let dir = TempDir::new().unwrap();
    let (csv, _) = gen(&dir, "inst.csv", "0.1", "3", "5");
    let out = vorpca(&[
        "solve", "--input", p(&csv), "--r", "1", "--k", "2", "--method", "brute", "--budget", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn voronoi2d_rejects_non_planar_input() {
    let dir = TempDir::new().unwrap();
    let (csv, _) = gen(&dir, "inst.csv", "0.1", "3", "5");
    let out = vorpca(&["solve", "--input", p(&csv), "--r", "1", "--k", "2", "--method", "voronoi2d"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn diag_closed_forms() {
    let v = json(&vorpca(&["diag", "volume", "--r", "1", "--d", "3"]));
    assert!((v["volume"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    let v = json(&vorpca(&["diag", "samples", "--alpha", "0.1", "--eps", "0.9", "--r", "1", "--d", "2"]));
    assert_eq!(v["T"], 4);
    let v = json(&vorpca(&["diag", "ball", "--alpha", "0.1", "--r", "1", "--d", "2"]));
    assert!((v["bound"].as_f64().unwrap() - 0.1 * (2.0 * std::f64::consts::E).sqrt()).abs() < 1e-12);
}

#[test]
fn diag_mc_ball_reports_exact_value() {
    let out = vorpca(&[
        "diag", "mc-ball", "--alpha", "0.1", "--r", "1", "--d", "2", "--samples", "20000", "--seed", "4",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let exact = v["exact"].as_f64().unwrap();
    assert!((v["fraction"].as_f64().unwrap() - exact).abs() < 0.01);
    assert!(v["bound"].as_f64().unwrap() > 3.0 * exact);
}

#[test]
fn diag_gap_with_and_without_noise() {
    let dir = TempDir::new().unwrap();
    let (csv, _) = gen(&dir, "exact.csv", "0", "5", "7");
    let sidecar = csv.with_extension("json");
    let out = vorpca(&["diag", "gap", "--input", p(&csv), "--basis", p(&sidecar), "--k", "2"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["error"], "degenerate_gap");

    let (csv, _) = gen(&dir, "noisy.csv", "0.05", "5", "7");
    let sidecar = csv.with_extension("json");
    let out = vorpca(&["diag", "gap", "--input", p(&csv), "--basis", p(&sidecar), "--k", "2"]);
    assert!(out.status.success());
    assert!(json(&out)["alpha"].as_f64().unwrap() >= 4.0);

    let out = vorpca(&[
        "diag", "preserve", "--input", p(&csv), "--basis", p(&sidecar), "--k", "2", "--probes", "100",
        "--seed", "1",
    ]);
    assert!(out.status.success());
    assert!(json(&out)["radius"].as_f64().unwrap() > 0.0);
}

#[test]
fn diag_arcs_with_svg() {
    let dir = TempDir::new().unwrap();
    let csv = collinear(&dir);
    let svg = dir.path().join("arcs.svg");
    let out = vorpca(&["diag", "arcs", "--input", p(&csv), "--k", "1", "--svg", p(&svg)]);
    assert!(out.status.success());
    let cells = json(&out)["cells"].as_array().unwrap().len();
    assert!(cells >= 2);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn bench_emits_json_lines() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("suite.json");
    std::fs::write(
        &config,
        r#"{"seed": 3, "trials": 3, "methods": ["brute", "voronoi2d", "randomized"], "t_grid": [8, 64],
            "instances": [{"n": 8, "d": 2, "r": 1, "k": 2, "noise_sigma": 0.05, "gap_gamma": 3.0}]}"#,
    )
    .unwrap();
    let out = vorpca(&["bench", "--config", p(&config)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3 * 4);
    for rec in lines.iter().filter(|r| r["method"] == "voronoi2d") {
        assert_eq!(rec["match_oracle"], true);
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("voronoi2d"));
}

#[test]
fn unreadable_input_is_an_io_error() {
    let out = vorpca(&["solve", "--input", "/nonexistent.csv", "--r", "1", "--k", "0", "--method", "brute"]);
    assert_eq!(out.status.code(), Some(1));
}
