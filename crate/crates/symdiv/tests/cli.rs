use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use symdiv::format::{write_json, BasisFile};
use symdiv_core::measure::gellmann_basis;
use tempfile::TempDir;

fn symdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symdiv"))
        .args(args)
        .env_remove("SYMDIV_TOL")
        .output()
        .expect("binary should run")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn close(v: &Value, expected: f64) -> bool {
    (v.as_f64().unwrap() - expected).abs() < 1e-12
}

#[test]
fn povm_build_writes_file_and_reports_constants() {
    let dir = TempDir::new().unwrap();
    let povm = dir.path().join("mub3.json");
    let out = symdiv(&["povm", "build", "--family", "mub", "--d", "3", "--out", povm.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["command"], "povm build");
    assert!(close(&report["results"]["metadata"]["x"], 1.0));
    assert!(close(&report["results"]["design"]["kappa_plus"], 1.0));
    assert!(close(&report["results"]["design"]["kappa_minus"], 1.0));

    let file = read(&povm);
    assert_eq!(file["schema_version"], 1);
    assert_eq!(file["metadata"]["N"], 4);
    assert_eq!(file["operators"].as_array().unwrap().len(), 4);
    assert_eq!(file["operators"][0][0][0][0].as_array().unwrap().len(), 2);

    let verify = symdiv(&["povm", "verify", "--povm-file", povm.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
    assert_eq!(json_stdout(&verify)["results"]["pass"], true);
}

#[test]
fn gellmann_mum_metadata() {
    let out = symdiv(&["povm", "build", "--family", "gellmann-mum", "--d", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_stdout(&out);
    assert!(close(&r["results"]["metadata"]["x"], 5.0 / 9.0));
    assert!(close(&r["results"]["design"]["kappa_plus"], 11.0 / 9.0));
}

#[test]
fn non_prime_dimension_is_a_usage_error() {
    let out = symdiv(&["povm", "build", "--family", "mub", "--d", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d must be prime"));
}

#[test]
fn inconsistent_flags_are_usage_errors() {
    assert_eq!(symdiv(&["povm", "build", "--family", "pauli-15-2", "--d", "3"]).status.code(), Some(2));
    assert_eq!(symdiv(&["povm", "build", "--family", "mub", "--d", "3", "--N", "3"]).status.code(), Some(2));
    assert_eq!(symdiv(&["povm", "build"]).status.code(), Some(2));
    assert_eq!(symdiv(&["povm", "frobnicate"]).status.code(), Some(2));
}

#[test]
fn out_of_range_t_reports_witness() {
    let out = symdiv(&["povm", "build", "--family", "gellmann-mum", "--d", "3", "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside"));
}

#[test]
fn custom_family_from_basis_file() {
    let dir = TempDir::new().unwrap();
    let basis = dir.path().join("basis.json");
    write_json(&basis, &BasisFile::from_basis(&gellmann_basis(3).unwrap())).unwrap();
    let t = (1.0 / (3.0 * (1.0 + 3f64.sqrt()))).to_string();
    let out = symdiv(&[
        "povm",
        "build",
        "--family",
        "custom",
        "--basis-file",
        basis.to_str().unwrap(),
        "--t",
        &t,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_stdout(&out);
    assert_eq!(r["results"]["metadata"]["family"], "custom");
    assert!((r["results"]["metadata"]["x"].as_f64().unwrap() - 5.0 / 9.0).abs() < 1e-12);
}

#[test]
fn channel_classification_examples() {
    let run = |lambda: &str| {
        let out = symdiv(&["channel", "classify", "--family", "mub", "--d", "3", "--lambda", lambda]);
        assert_eq!(out.status.code(), Some(0));
        json_stdout(&out)["results"]["channel"].clone()
    };
    assert_eq!(run("1,1,1,1")["cp_exact"], true);
    assert_eq!(run("0.25,0.25,0.25,0.25")["eb_sufficient"]["holds"], true);
    assert_eq!(run("-0.5,0.1,0.1,0.1")["fujiwara_algoet"], false);

    let mismatch = symdiv(&["channel", "classify", "--family", "mub", "--d", "3", "--lambda", "1,1"]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn channel_from_probabilities() {
    let out = symdiv(&[
        "channel",
        "classify",
        "--family",
        "mub",
        "--d",
        "3",
        "--probs",
        "1,0,0,0,0",
        "--variant",
        "Ltilde",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_stdout(&out);
    assert_eq!(r["results"]["channel"]["spec"]["variant"], "LambdaTilde");
    assert_eq!(r["results"]["channel"]["cp_exact"], true);
}

#[test]
fn semigroup_classification_is_cp_everywhere_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let csv = dir.path().join("series.csv");
    for path in [&a, &b] {
        let out = symdiv(&[
            "dynamics",
            "classify",
            "--family",
            "mub",
            "--d",
            "3",
            "--gamma-const",
            "1,1,1,1",
            "--grid",
            "0:1:100",
            "--out",
            path.to_str().unwrap(),
            "--csv-out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let r = read(&a);
    let div = &r["results"]["divisibility"];
    assert_eq!(div["cp_divisible"], true);
    let snaps = div["snapshots"].as_array().unwrap();
    assert_eq!(snaps.len(), 101);
    assert!(snaps.iter().all(|s| s["cp_exact"] == true && s["cp_sufficient"]["holds"] == true));
    assert!(div["violations"].as_array().unwrap().is_empty());
    assert_eq!(r["provenance"]["seed"], 0);
    assert!(r["provenance"].get("wall_time_s").is_none());

    let series = fs::read_to_string(&csv).unwrap();
    assert!(series.starts_with("t,gamma_1,gamma_2,gamma_3,gamma_4,xi_1"));
    assert_eq!(series.lines().count(), 102);
}

#[test]
fn trajectory_csv_and_grid_mismatch() {
    let dir = TempDir::new().unwrap();
    let traj = dir.path().join("traj.csv");
    fs::write(&traj, "t,gamma_1,gamma_2,gamma_3,gamma_4\n0,1,1,-1,-1\n0.5,1,1,-1,-1\n1,1,1,-1,-1\n").unwrap();
    let base = ["dynamics", "classify", "--family", "mub", "--d", "3", "--gamma-csv", traj.to_str().unwrap()];

    let ok = symdiv(&[&base[..], &["--grid", "0:1:2", "--samples", "8"]].concat());
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let r = json_stdout(&ok);
    let div = &r["results"]["divisibility"];
    assert_eq!(div["p_necessary"], false);
    assert!(!div["violations"].as_array().unwrap().is_empty());

    let bad = symdiv(&[&base[..], &["--grid", "0:1:4"]].concat());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("grid/trajectory mismatch"));

    let wrong_n = symdiv(&["dynamics", "classify", "--family", "mub", "--d", "2", "--gamma-csv", traj.to_str().unwrap()]);
    assert_eq!(wrong_n.status.code(), Some(2));
}

#[test]
fn golden_examples() {
    let qutrit = symdiv(&["dynamics", "example", "--example", "mub-qutrit"]);
    assert_eq!(qutrit.status.code(), Some(0));
    let checks = json_stdout(&qutrit)["results"]["checks"].clone();
    assert!(checks.as_array().unwrap().iter().all(|c| c["pass"] == true));

    let ququart = symdiv(&["dynamics", "example", "--example", "ququart-15-2"]);
    assert_eq!(ququart.status.code(), Some(0));
    let r = json_stdout(&ququart);
    assert!(r["results"]["checks"][0]["observed"].as_str().unwrap().starts_with("2 "));
}

// The closed-form Gell-Mann regions disagree with their oracles; the example
// must report that as a golden mismatch rather than pass.
#[test]
fn gellmann_example_reports_mismatch() {
    let out = symdiv(&["dynamics", "example", "--example", "mum-gellmann", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MISMATCH"));
    let r = json_stdout(&out);
    assert_eq!(r["results"]["pass"], false);
    let checks = r["results"]["checks"].as_array().unwrap();
    assert!(checks.iter().take(5).all(|c| c["pass"] == true));
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_symdiv"))
        .args(["povm", "build", "--family", "mub", "--d", "2"])
        .env("SYMDIV_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(close(&json_stdout(&out)["provenance"]["tolerances"]["psd"], 1e-6));

    let bad = Command::new(env!("CARGO_BIN_EXE_symdiv"))
        .args(["povm", "build", "--family", "mub", "--d", "2"])
        .env("SYMDIV_TOL", "loose")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));

    let flag = symdiv(&["--tol", "1e-8", "povm", "build", "--family", "mub", "--d", "2"]);
    assert!(close(&json_stdout(&flag)["provenance"]["tolerances"]["psd"], 1e-8));
}

#[test]
fn wall_time_is_opt_in() {
    let out = symdiv(&["povm", "build", "--family", "mub", "--d", "2", "--wall-time"]);
    assert!(json_stdout(&out)["provenance"]["wall_time_s"].is_f64());
}
