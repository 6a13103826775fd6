use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hradon(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hradon")).current_dir(dir).args(args).output().unwrap()
}

fn summary(out: &Output) -> Value {
    let stdout = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(stdout.lines().last().expect("summary line")).unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Value {
    let out = hradon(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let s = summary(&out);
    assert_eq!(s["status"], "ok");
    s
}

fn read(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn grid_values(dir: &Path, name: &str) -> Vec<Vec<f64>> {
    std::fs::read_to_string(dir.join(name))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn lattice_example_passes_verification() {
    let d = tempfile::tempdir().unwrap();
    let s = ok(d.path(), &["lattice", "--space", "s2", "--rho", "0.3", "--seed", "1", "--out", "l.json"]);
    let r = &s["report"];
    assert!(r["min_pairwise"].as_f64().unwrap() >= 0.3);
    assert!(r["covering_radius"].as_f64().unwrap() <= 0.3);
    assert_eq!(read(d.path(), "l.json")["report"], *r);
}

#[test]
fn funk_round_trip_through_files() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["pipeline", "funk", "--band", "8", "--seed", "3", "--out-dir", "p"]);
    ok(d.path(), &["funk", "forward", "--in", "p/truth.json", "--out", "g.json"]);
    ok(d.path(), &["funk", "inverse", "--in", "g.json", "--out", "back.json"]);
    let (a, b) = (read(d.path(), "p/truth.json"), read(d.path(), "back.json"));
    let (a, b) = (a["coeffs"].as_array().unwrap(), b["coeffs"].as_array().unwrap());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x[2].as_f64().unwrap() - y[2].as_f64().unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn discrete_inversion_from_files_matches_the_pipeline() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["pipeline", "funk", "--band", "6", "--out-dir", "p"]);
    ok(
        d.path(),
        &[
            "funk",
            "discrete-invert",
            "--rule",
            "p/rule.json",
            "--samples",
            "p/samples.csv",
            "--band",
            "6",
            "--out",
            "f.json",
        ],
    );
    assert_eq!(read(d.path(), "f.json"), read(d.path(), "p/recovered.json"));

    ok(d.path(), &["pipeline", "so3", "--band", "2", "--out-dir", "q"]);
    ok(
        d.path(),
        &[
            "so3",
            "discrete-invert",
            "--rule",
            "q/rule.json",
            "--samples",
            "q/samples.csv",
            "--band",
            "2",
            "--out",
            "h.json",
        ],
    );
    assert_eq!(read(d.path(), "h.json"), read(d.path(), "q/recovered.json"));
}

#[test]
fn so3_radon_round_trip() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["pipeline", "so3", "--band", "2", "--out-dir", "q"]);
    ok(d.path(), &["so3", "radon", "forward", "--in", "q/truth.json", "--out", "g.json"]);
    assert_eq!(read(d.path(), "g.json")["space"], "s2xs2");
    ok(d.path(), &["so3", "radon", "inverse", "--in", "g.json", "--out", "f.json"]);
    let (a, b) = (read(d.path(), "q/truth.json"), read(d.path(), "f.json"));
    for (x, y) in a["blocks"].as_array().unwrap().iter().zip(b["blocks"].as_array().unwrap()) {
        let (x, y) = (x["re"].as_array().unwrap(), y["re"].as_array().unwrap());
        for (r, s) in x.iter().zip(y) {
            for (u, v) in r.as_array().unwrap().iter().zip(s.as_array().unwrap()) {
                assert!((u.as_f64().unwrap() - v.as_f64().unwrap()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn constant_spectrum_gives_a_constant_grid() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.json"), r#"{"space":"s2","degree_max":0,"coeffs":[[0,1,2.0]]}"#).unwrap();
    ok(d.path(), &["grid", "--in", "c.json", "--n-theta", "7", "--n-phi", "9", "--out", "g.csv"]);
    let g = grid_values(d.path(), "g.csv");
    assert_eq!(g.len(), 63);
    let c = 2.0 / (4.0 * std::f64::consts::PI).sqrt();
    assert!(g.iter().all(|r| (r[2] - c).abs() < 1e-14));
}

#[test]
fn degree_two_grid_is_antisymmetric_about_the_equator() {
    // i = 2 at k = 2 is proportional to yz
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("y.json"), r#"{"space":"s2","degree_max":2,"coeffs":[[2,2,1.0]]}"#).unwrap();
    ok(d.path(), &["grid", "--in", "y.json", "--n-theta", "10", "--n-phi", "12", "--out", "g.csv"]);
    let g = grid_values(d.path(), "g.csv");
    let sum: f64 = g.iter().map(|r| r[2]).sum();
    assert!(sum.abs() < 1e-9);
    for a in 0..10 {
        for b in 0..12 {
            let (u, v) = (g[a * 12 + b][2], g[(9 - a) * 12 + b][2]);
            assert!((u + v).abs() < 1e-9);
        }
    }
}

#[test]
fn single_cell_grid_has_one_row() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.json"), r#"{"space":"s2","degree_max":1,"coeffs":[[1,2,1.0]]}"#).unwrap();
    ok(d.path(), &["grid", "--in", "c.json", "--n-theta", "1", "--n-phi", "1", "--out", "g.csv"]);
    assert_eq!(grid_values(d.path(), "g.csv").len(), 1);
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let out = hradon(p, &["lattice", "--space", "s2", "--rho", "0.3", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let out = hradon(p, &["lattice", "--space", "s2", "--rho=-0.5", "--out", "l.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(summary(&out)["status"], "error");
    assert!(!p.join("l.json").exists());

    let out = hradon(p, &["funk", "forward", "--in", "missing.json", "--out", "g.json"]);
    assert_eq!(out.status.code(), Some(3));

    std::fs::write(p.join("odd.json"), r#"{"space":"s2","degree_max":1,"coeffs":[[1,1,1.0]]}"#).unwrap();
    let out = hradon(p, &["funk", "inverse", "--in", "odd.json", "--out", "g.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!p.join("g.json").exists());
    ok(p, &["--tol", "2", "funk", "inverse", "--in", "odd.json", "--out", "g.json"]);

    ok(p, &["lattice", "--space", "s2", "--rho", "0.6", "--out", "l.json"]);
    let out = hradon(p, &["cubature", "solve", "--lattice", "l.json", "--degree", "16", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!p.join("r.json").exists());

    let out = hradon(p, &["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let d = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_hradon"))
            .current_dir(d.path())
            .env("HRADON_THREADS", threads)
            .args(["pipeline", "funk", "--band", "6", "--seed", "2", "--out-dir", name])
            .output()
            .unwrap();
        assert!(out.status.success());
        std::fs::read(d.path().join(name).join("recovered.json")).unwrap()
    };
    assert_eq!(run("1", "a"), run("3", "b"));
    let out = Command::new(env!("CARGO_BIN_EXE_hradon"))
        .env("HRADON_THREADS", "zero")
        .args(["lattice", "--space", "s2", "--rho", "0.5", "--out", "x.json"])
        .current_dir(d.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn spline_fit_reproduces_point_values() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let pts = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.6, 0.0, -0.8], [-0.6, 0.8, 0.0]];
    let funcs: Vec<Value> = pts.iter().map(|x| serde_json::json!({"kind": "point", "point": x})).collect();
    std::fs::write(p.join("f.json"), serde_json::to_string(&funcs).unwrap()).unwrap();
    std::fs::write(p.join("v.csv"), "value\n1.0\n-2.0\n0.5\n0.0\n3.0\n").unwrap();
    let s = ok(
        p,
        &[
            "spline",
            "fit",
            "--space",
            "s2",
            "--t",
            "3",
            "--functionals",
            "f.json",
            "--values",
            "v.csv",
            "--out",
            "s.json",
        ],
    );
    assert!(s["interpolation_residual"].as_f64().unwrap() < 1e-10);
    let spline = read(p, "s.json");
    assert_eq!(spline["functionals"].as_array().unwrap().len(), 5);

    let out = hradon(
        p,
        &[
            "spline",
            "fit",
            "--space",
            "so3",
            "--t",
            "3",
            "--functionals",
            "f.json",
            "--values",
            "v.csv",
            "--out",
            "s2.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(p.join("v.csv"), "value\n1.0\n").unwrap();
    let out = hradon(
        p,
        &[
            "spline",
            "fit",
            "--space",
            "s2",
            "--t",
            "3",
            "--functionals",
            "f.json",
            "--values",
            "v.csv",
            "--out",
            "s3.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn frame_analysis_and_synthesis_through_files() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["pipeline", "funk", "--band", "4", "--out-dir", "f"]);
    let b = ok(p, &["frame", "build", "--band", "4", "--out", "atlas.json"]);
    assert!(b["j_max"].as_u64().unwrap() >= 1);
    let a = ok(p, &["frame", "analyze", "--atlas", "atlas.json", "--in", "f/truth.json", "--out", "c.json"]);
    let (e, n) = (a["energy"].as_f64().unwrap(), a["norm_squared"].as_f64().unwrap());
    assert!((e - n).abs() <= 1e-8 * n);
    ok(p, &["frame", "synthesize", "--atlas", "atlas.json", "--coeffs", "c.json", "--out", "back.json"]);
    let (x, y) = (read(p, "f/truth.json"), read(p, "back.json"));
    for (u, v) in x["coeffs"].as_array().unwrap().iter().zip(y["coeffs"].as_array().unwrap()) {
        assert!((u[2].as_f64().unwrap() - v[2].as_f64().unwrap()).abs() < 1e-8);
    }
}
