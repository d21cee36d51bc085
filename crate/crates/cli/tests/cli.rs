//! End-to-end checks of the command-line surface: exit codes, formats
//! and byte-determinism.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_divdivlab"))
}

#[test]
fn identities_check_passes_with_json() {
    let out = bin()
        .args(["identities", "check", "--cases", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let body = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["results"].as_array().unwrap().len() >= 10);
    assert!(v["tool_version"].is_string());
}

#[test]
fn dims_table_tsv() {
    let out = bin()
        .args([
            "dims", "table", "--mesh", "two_tets", "--format", "tsv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let body = String::from_utf8(out.stdout).unwrap();
    assert!(body.starts_with("tag\tparams\tpass"));
    assert!(body.contains("Sigma_h_S"));
    assert!(body.contains("197"));
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["complex", "verify", "--name", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["element", "unisolvence", "--name", "divdiv3d", "--l", "2", "--k", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // clap-level usage error
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn byte_identical_reports() {
    let run = || {
        bin()
            .args(["complex", "verify", "--name", "hessian2d", "--k", "2..3"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn mesh_file_loading() {
    let dir = std::env::temp_dir().join("divdivlab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("one_tet.mesh");
    std::fs::write(&path, "4 1\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n0 1 2 3\n").unwrap();
    let out = bin()
        .args([
            "mesh",
            "verify",
            "--mesh-file",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["pass"], true);
}
