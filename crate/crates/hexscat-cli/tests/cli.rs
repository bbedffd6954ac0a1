use std::path::Path;
use std::process::{Command, Output};

fn hexscat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexscat")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_lattice_passes() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("lemmas.json");
    let out = hexscat(&["verify-lattice", "--radius", "4", "--out", path(&rep)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    assert!(v["lemmas"].as_array().unwrap().iter().all(|l| l["violations"] == 0));
}

#[test]
fn verify_support_passes() {
    let out = hexscat(&["verify-support", "--max-s", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn spectrum_csv_has_the_top_of_the_band_at_the_origin() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let out = hexscat(&["spectrum", "--grid", "64", "--out", path(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("xi1,xi2,p,grad_norm"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 64 * 64);
    let origin = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).expect("origin sampled");
    assert_eq!(origin[2], 3.0);
    assert!(rows.iter().all(|r| r[2] <= 3.0 + 1e-12));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(hexscat(&["spectrum", "--grid", "8"]).status.code(), Some(2));
    assert_eq!(hexscat(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(hexscat(&["zeta", "--N", "100", "--theta", "0.5"]).status.code(), Some(2));
    let out = hexscat(&["forward", "--potential", "/nonexistent.json", "--z-re", "1", "--z-im", "100", "--theta", "0.2", "--theta-prime", "0.2", "--block", "22"]);
    assert_eq!(out.status.code(), Some(2));
    let diag: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"], "usage");
    assert_eq!(hexscat(&["forward", "--potential", "x.json", "--z-re", "1", "--z-im", "1", "--theta", "0.2", "--theta-prime", "0.2", "--block", "12"]).status.code(), Some(2));
}

#[test]
fn r0_methods_agree() {
    let base = ["r0", "--z-re", "1", "--z-im", "20", "--n1", "2", "--n2", "-1"];
    let q = json(&hexscat(&[&base[..], &["--method", "quad"]].concat()));
    let s = json(&hexscat(&[&base[..], &["--method", "series"]].concat()));
    for i in 0..2 {
        for j in 0..2 {
            for part in ["re", "im"] {
                let a = q["block"][i][j][part].as_f64().unwrap();
                let b = s["block"][i][j][part].as_f64().unwrap();
                assert!((a - b).abs() < 1e-10, "{i}{j} {part}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn zeta_reports_prediction() {
    let v = json(&hexscat(&["zeta", "--N", "1000", "--theta", "0.2", "--branch", "pos"]));
    let im2 = v["zeta"][1]["im"].as_f64().unwrap();
    let pred = v["prediction"]["im2"].as_f64().unwrap();
    assert!((im2 - pred).abs() < 1e-4);
    assert!(v["method_gap"].as_f64().unwrap() < 1e-9);
}

#[test]
fn gen_potential_is_deterministic_and_forward_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let a = hexscat(&["gen-potential", "--M", "2", "--seed", "7"]);
    let b = hexscat(&["gen-potential", "--M", "2", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let q = dir.path().join("q.json");
    std::fs::write(&q, &a.stdout).unwrap();
    let args = ["forward", "--potential", path(&q), "--z-re", "1", "--z-im", "50", "--theta", "0.2", "--theta-prime", "0.15", "--block", "11"];
    let f1 = hexscat(&args);
    assert_eq!(f1.status.code(), Some(0));
    assert_eq!(f1.stdout, hexscat(&args).stdout);
    let v = json(&f1);
    let b = v["b"]["re"].as_f64().unwrap();
    let b0 = v["b0"]["re"].as_f64().unwrap();
    let b1 = v["b1"]["re"].as_f64().unwrap();
    assert!((b - (b0 - b1)).abs() <= 1e-9 * b.abs().max(1.0));
}

#[test]
fn forward_of_zero_potential_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("zero.json");
    std::fs::write(&q, r#"{"M": 1, "sites": []}"#).unwrap();
    let v = json(&hexscat(&["forward", "--potential", path(&q), "--z-re", "1", "--z-im", "30", "--theta", "0.1", "--theta-prime", "0.2", "--block", "22", "--precision", "f64"]));
    assert_eq!(v["b"]["re"], 0.0);
    assert_eq!(v["b"]["im"], 0.0);
}

#[test]
fn reconstruct_round_trip_is_exact_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.json");
    assert_eq!(hexscat(&["gen-potential", "--M", "1", "--seed", "3", "--out", path(&q)]).status.code(), Some(0));
    let run = |tag: &str| {
        let rec = dir.path().join(format!("rec{tag}.json"));
        let rep = dir.path().join(format!("rep{tag}.json"));
        let out = hexscat(&["reconstruct", "--potential", path(&q), "--points", "24", "--thetas", "5", "--out", path(&rec), "--report", path(&rep)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(rec).unwrap(), std::fs::read(rep).unwrap())
    };
    let (rec_a, rep_a) = run("a");
    let (rec_b, rep_b) = run("b");
    assert_eq!(rec_a, rec_b);
    assert_eq!(rep_a, rep_b);
    let rep: serde_json::Value = serde_json::from_slice(&rep_a).unwrap();
    assert_eq!(rep["complete"], true);
    assert!(rep["max_abs_error"].as_f64().unwrap() <= 1e-2);
    assert_eq!(rep["rows"].as_array().unwrap().len(), 6);
}
