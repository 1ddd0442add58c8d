//! End-to-end CLI tests: the exit-code contract (0 success, 1
//! mathematical failure, 2 input error) and the report contents.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use serde_json::Value;

use ainfty_core::dga::builtin_dga;
use ainfty_core::hodge::{build_hodge, identity_gram};
use ainfty_core::ingest;
use ainfty_core::transfer::lambda_eval;

fn ainfty(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ainfty"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (
        out.status.code().unwrap_or(-1),
        json,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.display().to_string()
}

#[test]
fn validate_builtin_passes() {
    let (code, json, _) = ainfty(&["validate", "--builtin", "sphere2"]);
    assert_eq!(code, 0);
    assert_eq!(json["ok"], Value::Bool(true));
}

#[test]
fn validate_broken_leibniz_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let dga = builtin_dga("interval").unwrap();
    let mut value = ingest::serialize_dga(&dga);
    // corrupt one cup-product structure constant
    value["mult"]["0,0"][0][0][0] = Value::String("1/2".into());
    let path = write(dir.path(), "broken.json", &value.to_string());
    let (code, json, _) = ainfty(&["validate", "--dga", &path]);
    assert_eq!(code, 1);
    assert_eq!(json["ok"], Value::Bool(false));
    let failure = &json["report"]["first_failure"];
    assert!(failure.is_object());
    assert!(failure["indices"].is_array());
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, stderr) = ainfty(&["validate", "--dga", "/nonexistent/file.json"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("input error"));
}

#[test]
fn transfer_sphere2_harmonic_produces_mu3_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.json");
    let status = Command::new(env!("CARGO_BIN_EXE_ainfty"))
        .args([
            "transfer", "--builtin", "sphere2", "--subcomplex", "harm", "--max-order", "6",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["all_zero"], Value::Bool(true));
    assert!(json["tables"]["3"].is_array());
    assert!(!json["tables"]["3"].as_array().unwrap().is_empty());

    // freshly produced table re-verifies
    let (code, json, _) = ainfty(&["verify", "--table", out.to_str().unwrap(), "--builtin", "sphere2"]);
    assert_eq!(code, 0);
    assert_eq!(json["ok"], Value::Bool(true));
}

#[test]
fn verify_detects_corruption_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.json");
    Command::new(env!("CARGO_BIN_EXE_ainfty"))
        .args([
            "transfer", "--builtin", "sphere2", "--subcomplex", "harm", "--max-order", "4",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();

    // corrupt one stored μ₂ value with a nonempty coordinate vector
    let mut json: Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let entries = json["tables"]["2"].as_array_mut().unwrap();
    let entry = entries
        .iter_mut()
        .find(|e| !e["value"].as_array().unwrap().is_empty())
        .unwrap();
    entry["value"][0] = Value::String("355/113".into());
    let corrupted = write(dir.path(), "corrupted.json", &json.to_string());
    let (code, report, _) = ainfty(&["verify", "--table", &corrupted, "--builtin", "sphere2"]);
    assert_eq!(code, 1);
    assert_eq!(report["ok"], Value::Bool(false));
    // the violated level carries its first counterexample tuple
    let levels = report["report"]["levels"].as_array().unwrap();
    let bad = levels.iter().find(|l| l["failures"].as_u64().unwrap() > 0).unwrap();
    assert!(bad["first_failure"]["args"].is_array());

    // mismatched algebra
    let (code, _, stderr) = ainfty(&["verify", "--table", out.to_str().unwrap(), "--builtin", "torus"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("hash mismatch"));
}

#[test]
fn hodge_betti_numbers() {
    for (name, betti) in [
        ("sphere2", vec![1u64, 0, 1]),
        ("torus", vec![1, 2, 1]),
        ("point", vec![1]),
    ] {
        let (code, json, _) = ainfty(&["hodge", "--builtin", name]);
        assert_eq!(code, 0);
        let got: Vec<u64> = json["betti"]
            .as_object()
            .unwrap()
            .values()
            .map(|v| v.as_u64().unwrap())
            .collect();
        assert_eq!(got, betti, "{name}");
    }
}

#[test]
fn hodge_on_complex_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "sphere.txt",
        "# boundary of the 3-simplex\na b c\na b d\na c d\nb c d\n",
    );
    let (code, json, _) = ainfty(&["hodge", "--complex", &path]);
    assert_eq!(code, 0);
    assert_eq!(json["dims"]["1"], Value::from(6));
    assert_eq!(json["betti"]["2"], Value::from(1));
}

#[test]
fn custom_homotopy_violating_the_assumption_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // an arbitrary shift −1 map on sphere2: all-ones block from degree 1
    let q = r#"{
        "format": "graded-map",
        "shift": -1,
        "blocks": { "1": [["1","1","1","1","1","1"],["1","1","1","1","1","1"],["1","1","1","1","1","1"],["1","1","1","1","1","1"]] }
    }"#;
    let q_path = write(dir.path(), "q.json", q);
    let (code, _, stderr) = ainfty(&[
        "transfer", "--builtin", "sphere2", "--subcomplex", "harm", "--Q",
        &format!("file:{q_path}"),
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("failure"));
}

#[test]
fn custom_subcomplex_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    // harmonic subcomplex of the interval, supplied as a custom file
    let w = r#"{
        "format": "subcomplex",
        "blocks": { "0": [["1"],["1"]] }
    }"#;
    let w_path = write(dir.path(), "w.json", w);
    let (code, json, _) = ainfty(&[
        "transfer", "--builtin", "interval", "--subcomplex",
        &format!("custom:{w_path}"), "--max-order", "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json["all_zero"], Value::Bool(true));
}

#[test]
fn kerd_subcomplex_on_interval_passes() {
    let (code, json, _) = ainfty(&[
        "transfer", "--builtin", "interval", "--subcomplex", "kerd", "--max-order", "6",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json["all_zero"], Value::Bool(true));
    // W = ker d has one basis vector in each of degrees 0 and 1
    assert_eq!(json["w_dims"]["0"], Value::from(1));
    assert_eq!(json["w_dims"]["1"], Value::from(1));
}

#[test]
fn mu3_is_zero_for_zero_homotopy() {
    let (code, json, _) = ainfty(&[
        "mu3", "--builtin", "massey_witness", "--subcomplex", "full", "--Q", "zero",
        "--elements", "1:0", "1:1", "1:2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json["nonzero"], Value::Bool(false));
}

#[test]
fn mu3_on_massey_triple_is_nonzero_and_not_exact() {
    let (code, json, _) = ainfty(&[
        "mu3", "--builtin", "massey_witness", "--elements", "1:0", "1:1", "1:1",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json["nonzero"], Value::Bool(true));
    assert_eq!(json["mu1_exact"], Value::Bool(false));

    // oracle: the hand-chosen primitive u = z has du = xy, yy = 0, so
    // the triple product representative is ±(u·y) = ∓yz; the reported
    // ambient value must be its harmonic projection up to that sign.
    let dga = Arc::new(builtin_dga("massey_witness").unwrap());
    let pkg = build_hodge(dga.clone(), identity_gram(dga.space())).unwrap();
    let space = dga.space().clone();
    let (x, y, z) = (
        space.basis_vector(1, 0),
        space.basis_vector(1, 1),
        space.basis_vector(1, 2),
    );
    assert_eq!(dga.d_apply(&z), dga.multiply(&x, &y));
    assert!(dga.multiply(&y, &y).is_zero());
    let rep = pkg.harmonic_proj().apply(&dga.multiply(&z, &y));
    let reported: Vec<String> = json["mu3_ambient"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let rep_strings: Vec<String> = rep.coords.iter().map(ingest::format_scalar).collect();
    let rep_neg: Vec<String> = rep.neg().coords.iter().map(ingest::format_scalar).collect();
    assert!(reported == rep_strings || reported == rep_neg);
}

#[test]
fn mu3_on_sphere_harmonics_matches_lambda_display() {
    // μ₃(h⁰,h⁰,h⁰) must equal P(λ₃(h⁰,h⁰,h⁰)) evaluated independently
    let dga = Arc::new(builtin_dga("sphere2").unwrap());
    let pkg = build_hodge(dga.clone(), identity_gram(dga.space())).unwrap();
    let datum = pkg.datum_harmonic().unwrap();
    let h0 = datum.subcomplex().basis_ambient(0, 0);
    let lam3 = lambda_eval(&dga, &pkg.homotopy(), &[h0.clone(), h0.clone(), h0]);
    let expected = datum.project_to_w(&lam3);

    let (code, json, _) = ainfty(&[
        "mu3", "--builtin", "sphere2", "--elements", "0:0", "0:0", "0:0",
    ]);
    assert_eq!(code, 0);
    let got: Vec<String> = json["mu3"]["coords"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let want: Vec<String> = expected.coords.iter().map(ingest::format_scalar).collect();
    assert_eq!(got, want);
    assert_eq!(json["mu3"]["degree"], Value::from(-1));
}

#[test]
fn malformed_inputs_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad_rational = write(dir.path(), "bad.txt", "a a\n");
    let (code, _, _) = ainfty(&["hodge", "--complex", &bad_rational]);
    assert_eq!(code, 2);

    let bad_dga = write(dir.path(), "bad.json", "{\"format\": \"dga\"}");
    let (code, _, _) = ainfty(&["validate", "--dga", &bad_dga]);
    assert_eq!(code, 2);

    let (code, _, _) = ainfty(&["transfer", "--builtin", "sphere2", "--subcomplex", "bogus"]);
    assert_eq!(code, 2);

    let (code, _, _) = ainfty(&["transfer", "--builtin", "sphere2", "--max-order", "0"]);
    assert_eq!(code, 2);
    let (code, _, _) = ainfty(&["transfer", "--builtin", "sphere2", "--trials", "0"]);
    assert_eq!(code, 2);
}
