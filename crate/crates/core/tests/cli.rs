use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circrobust"))
        .args(args)
        .env_remove("CIRCROBUST_SEED")
        .env_remove("CIRCROBUST_LARVA_DATA")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_of(out: &Output) -> (i32, Value) {
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    (out.status.code().unwrap(), err["error"].clone())
}

fn angle_file(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn estimate_sea_stars() {
    let v = json(&run(&["estimate", "--data", "seastars", "--kind", "clms", "--model", "vm"]));
    let kappa = v["result"]["estimate"]["parameter"].as_f64().unwrap();
    assert!((kappa - 7.92).abs() < 0.05, "{kappa}");
    assert_eq!(v["result"]["n"], 22);
    assert_eq!(v["provenance"]["command"], "estimate");
    assert_eq!(v["provenance"]["seed"], 42);
    assert_eq!(v["provenance"]["config_hash"].as_str().unwrap().len(), 16);
}

#[test]
fn detect_frogs() {
    let v = json(&run(&["detect", "--data", "frogs", "--alpha", "0.01"]));
    let r = &v["result"];
    assert_eq!(r["flagged_count"], 1);
    let flagged: Vec<&Value> = r["points"].as_array().unwrap().iter().filter(|p| p["flagged"] == true).collect();
    assert_eq!(flagged[0]["index"], 13);
    for key in ["median", "parameter", "cutoff", "alpha", "model", "points"] {
        assert!(r.get(key).is_some(), "{key}");
    }
}

#[test]
fn are_asymptote() {
    let out = run(&["are", "--model", "vm", "--kind", "clts", "--kappa", "200"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\nparam,kind,are\n"));
    let rows = csv_rows(&text);
    let are: f64 = rows[0][2].parse().unwrap();
    assert!((are - 0.3067).abs() < 0.01, "{are}");
}

#[test]
fn outputs_are_deterministic_and_seeded() {
    let args = ["bias", "--n", "300", "--grid", "9", "--epsilon", "0.1", "--contamination", "mean-shift"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let rows = csv_rows(&String::from_utf8(a.stdout.clone()).unwrap());
    assert_eq!(rows.len(), 36);
    assert!(rows.iter().all(|r| r.len() == 6 && r[5] == "42"));

    let seeded = Command::new(env!("CARGO_BIN_EXE_circrobust"))
        .args(args)
        .env("CIRCROBUST_SEED", "7")
        .output()
        .unwrap();
    let text = String::from_utf8(seeded.stdout).unwrap();
    assert!(text.contains("# seed: 7\n"));
    assert_ne!(text.as_bytes(), a.stdout.as_slice());
}

#[test]
fn study_and_if_curve_schemas() {
    let out = run(&["study", "--param", "2", "--epsilon", "0,0.2", "--n", "60", "--reps", "8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("param,epsilon,estimator,min,q1,median,q3,max,failures\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0][2], "mle");

    let out = run(&["if-curve", "--kind", "clts", "--kappa", "2", "--grid", "11"]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 11);
    let first: f64 = rows[0][1].parse().unwrap();
    let last: f64 = rows[10][1].parse().unwrap();
    assert!((first - last).abs() < 1e-12);
}

#[test]
fn writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("frogs.svg");
    let out = run(&["violin", "--data", "frogs", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.contains("config_hash"));
    assert_eq!(svg.matches("class=\"outlier\"").count(), 1);
}

#[test]
fn file_input_matches_embedded() {
    let f = angle_file("id,angle\n");
    let body: String = [104, 110, 117, 121, 127, 130, 136, 145, 152, 178, 184, 192, 200, 316]
        .iter()
        .enumerate()
        .map(|(i, d)| format!("{i},{d}\n"))
        .collect();
    std::fs::write(f.path(), format!("id,angle\n{body}")).unwrap();
    let from_file = json(&run(&["detect", "--data", f.path().to_str().unwrap(), "--unit", "degrees"]));
    let embedded = json(&run(&["detect", "--data", "frogs"]));
    assert_eq!(from_file["result"], embedded["result"]);
}

#[test]
fn error_codes() {
    let bad = angle_file("0.1\n0.2\nnorth\n");
    let (code, e) = error_of(&run(&["estimate", "--data", bad.path().to_str().unwrap()]));
    assert_eq!(code, 2);
    assert_eq!(e["kind"], "parse");
    assert!(e["message"].as_str().unwrap().contains("line 3"));

    let (code, e) = error_of(&run(&["detect", "--data", "larva"]));
    assert_eq!((code, e["kind"].as_str().unwrap()), (2, "dataset_unavailable"));

    let square = angle_file("# unit: degrees\n0\n90\n180\n270\n");
    let (code, e) = error_of(&run(&["detect", "--data", square.path().to_str().unwrap()]));
    assert_eq!((code, e["kind"].as_str().unwrap()), (4, "non_unique_median"));

    let point = angle_file("0.5\n0.5\n0.5\n0.5\n");
    let (code, e) = error_of(&run(&["detect", "--data", point.path().to_str().unwrap(), "--baseline"]));
    assert_eq!((code, e["kind"].as_str().unwrap()), (5, "explosion"));

    let (code, e) = error_of(&run(&["are", "--kappa=-1"]));
    assert_eq!(code, 3);
    assert_eq!(e["kind"], "out_of_range");

    let (code, _) = error_of(&run(&["detect", "--data", "/no/such/file.txt"]));
    assert_eq!(code, 1);

    let (code, e) = error_of(&run(&["detect", "--data", "frogs", "--alpha", "lots"]));
    assert_eq!((code, e["kind"].as_str().unwrap()), (2, "usage"));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn breakdown_is_reported_not_raised() {
    let point = angle_file("0.5\n0.5\n0.5\n0.5\n1.0\n");
    let v = json(&run(&["estimate", "--data", point.path().to_str().unwrap(), "--model", "wn"]));
    let est = &v["result"]["estimate"];
    assert_eq!(est["breakdown"], "implosion");
    assert_eq!(est["parameter"], 0.0);
    let v = json(&run(&["estimate", "--data", point.path().to_str().unwrap()]));
    assert_eq!(v["result"]["estimate"]["parameter"], "inf");
}
