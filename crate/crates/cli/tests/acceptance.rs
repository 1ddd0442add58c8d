//! Acceptance criterion 10: identical CLI invocations (same flags, same
//! seed) reproduce byte-identical JSON reports.

use std::process::Command;

fn ainfty_to_file(args: &[&str], out: &std::path::Path) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_ainfty"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    status.status.code().unwrap_or(-1)
}

#[test]
fn c10_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut all_ok = true;
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", "--builtin", "sphere2"],
        vec!["hodge", "--builtin", "torus"],
        vec![
            "transfer", "--builtin", "torus", "--subcomplex", "harm", "--max-order", "4",
            "--seed", "11",
        ],
        vec![
            "transfer", "--builtin", "sphere2", "--subcomplex", "kerd", "--max-order", "4",
            "--mode", "random", "--trials", "60", "--seed", "7",
        ],
        vec![
            "mu3", "--builtin", "massey_witness", "--elements", "1:0", "1:1", "1:1",
        ],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = dir.path().join(format!("a{i}.json"));
        let b = dir.path().join(format!("b{i}.json"));
        let code_a = ainfty_to_file(args, &a);
        let code_b = ainfty_to_file(args, &b);
        let bytes_a = std::fs::read(&a).unwrap();
        let bytes_b = std::fs::read(&b).unwrap();
        let ok = code_a == code_b && bytes_a == bytes_b;
        if !ok {
            println!("    FAIL: run {i} ({args:?}) not reproducible");
        }
        all_ok &= ok;
    }
    println!(
        "criterion 10: {} — repeated CLI runs with identical flags and seed are byte-identical",
        if all_ok { "PASS" } else { "FAIL" }
    );
    assert!(all_ok);
}
