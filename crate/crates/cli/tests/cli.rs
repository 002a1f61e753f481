use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qlancaster"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

/// Drops fields that legitimately differ between runs.
fn mask(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("runtime_ms");
            m.values_mut().for_each(mask);
        }
        Value::Array(a) => a.iter_mut().for_each(mask),
        _ => {}
    }
}

#[test]
fn eval_matches_golden_files() {
    let out = run(&["eval", "poly", "--family", "qhermite", "-n", "2", "-x", "2", "-q", "0.3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("eval_poly.json"));
    let out = run(&["eval", "phi", "-n", "1", "--r1", "0.5", "--r2", "0.3", "-q", "0.5"]);
    assert_eq!(String::from_utf8(out.stdout.clone()).unwrap(), golden("eval_phi.json"));
    assert!((json(&out)["value"].as_f64().unwrap() - 0.695652).abs() < 1e-6);
    let out = run(&["eval", "phi", "-n", "0", "--r1", "0.5", "--r2", "0.3", "-q", "0.5"]);
    assert_eq!(json(&out)["value"], 1.0);
}

#[test]
fn eval_kernel_sum_and_closed_agree() {
    let args = ["--kernel", "main", "-x", "0.3", "-y", "-0.5", "-q", "0.5", "--r1", "0.5", "--r2", "-0.3"];
    let s = json(&run(&[&["eval", "kernel-sum"][..], &args].concat()));
    let c = json(&run(&[&["eval", "kernel-closed"][..], &args].concat()));
    assert!(s["tail_bound"].as_f64().unwrap() < 1e-12);
    assert!(c.get("tail_bound").is_none());
    assert!((s["value"].as_f64().unwrap() - c["value"].as_f64().unwrap()).abs() < 1e-10);
    let d = json(&run(&["eval", "density", "--kind", "f_u", "-x", "0", "-q", "0"]));
    assert!((d["value"].as_f64().unwrap() - 2.0 / std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn exit_codes() {
    let out = run(&["eval", "density", "--kind", "f_r", "-x", "0.3", "-q", "0.5", "--beta", "1.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta"));
    assert_eq!(run(&["eval", "poly", "--family", "ultra-r", "-n", "2", "-x", "1", "-q", "0.3"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // a zero tolerance cannot be met by quadrature
    let out = run(&["verify", "--suite", "orthogonality", "-q", "0.3", "--max-n", "3", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["summary"]["pass"], false);
}

#[test]
fn verify_exact_report() {
    let out = run(&["verify", "--suite", "exact", "--max-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let mut got = json(&out);
    let mut want: Value = serde_json::from_str(&golden("verify_exact_n2.json")).unwrap();
    mask(&mut got);
    mask(&mut want);
    assert_eq!(got, want);
    let rows = got["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["residual"] == "0"));
    assert!(rows.iter().any(|r| r["id"] == "pom1" && r["residual"] == "0"));
    assert_eq!(got["schema_version"], 1);
}

#[test]
fn verify_kernels_and_chapman() {
    let out = run(&["verify", "--suite", "kernels", "-q", "0.5", "--r1", "0.5", "--r2", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    let max = rows.iter().map(|r| r["max_abs_residual"].as_f64().unwrap()).fold(0.0, f64::max);
    assert!(max <= 1e-6);
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["check_id", "grid", "kind", "max_abs_residual", "params", "pass", "runtime_ms", "tolerance"]);
    let ids: Vec<&str> = rows.iter().map(|r| r["check_id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["verify", "--suite", "chapman", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["manifest"]["suite"], "chapman");
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn scan_csv() {
    let out = run(&["scan", "--r1", "0", "--r2", "0", "-q", "0.5", "--grid", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "x,y,sum,closed,abs_diff,tail"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r[2] == 1.0));

    let out = run(&["scan", "--r1", "0.7", "--r2", "-0.7", "-q", "0.9"]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 21 * 21);
    assert!(rows.iter().all(|r| r[2] >= -1e-7 && r[4] <= 1e-6 * r[3].abs().max(1.0)));
}

#[test]
fn sample_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let s = ["sample", "--r1", "0.5", "--r2", "0.3", "-q", "0.5", "--length", "1", "--seed", "42", "--out"];
        assert!(run(&[&s[..], &[p.to_str().unwrap()]].concat()).status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.lines().take_while(|l| l.starts_with('#')).count() >= 6);
    assert_eq!(csv_rows(&text).len(), 1);

    let out = run(&["sample", "--r1", "0.5", "--r2", "0.3", "-q", "0.5", "--length", "5", "--seed", "7"]);
    let got = String::from_utf8(out.stdout).unwrap();
    let want = golden("sample_len5.csv");
    let (g, w) = (csv_rows(&got), csv_rows(&want));
    assert_eq!(g.len(), w.len());
    for (x, y) in g.iter().zip(&w) {
        assert_eq!(x[0], y[0]);
        assert!((x[1] - y[1]).abs() <= 1e-12);
    }
    let header = |t: &str| t.lines().filter(|l| l.starts_with('#')).map(String::from).collect::<Vec<_>>();
    assert_eq!(header(&got), header(&want));
}
