//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with --nocapture to see the deviation summaries).
//! Criteria 1-7 exercise the library checks directly; criterion 8 drives
//! the installed binary.

use std::path::PathBuf;
use std::process::Command;

use chainstar::verify::{
    check_critical_visibilities, check_joint_vs_factorized, check_noise_oracle,
    check_oracle_equivalence, check_pinned_values, check_property_suite, check_window_endpoints,
    Check,
};

const BIN: &str = env!("CARGO_BIN_EXE_chainstar");

fn assert_check(criterion: usize, check: Check) {
    let status = if check.passed { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion} [{status}] {}: {}",
        check.name, check.detail
    );
    assert!(
        check.passed,
        "criterion {criterion} failed: {}",
        check.detail
    );
}

#[test]
fn criterion_1_oracle_equivalence() {
    assert_check(1, check_oracle_equivalence());
}

#[test]
fn criterion_2_noise_oracle() {
    assert_check(2, check_noise_oracle());
}

#[test]
fn criterion_3_pinned_reference_values() {
    assert_check(3, check_pinned_values());
}

#[test]
fn criterion_4_window_endpoints() {
    assert_check(4, check_window_endpoints());
}

#[test]
fn criterion_5_critical_visibilities() {
    assert_check(5, check_critical_visibilities());
}

#[test]
fn criterion_6_property_suite() {
    assert_check(6, check_property_suite());
}

#[test]
fn criterion_7_joint_vs_factorized() {
    assert_check(7, check_joint_vs_factorized());
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!(
        "chainstar-acceptance-{}-{name}",
        std::process::id()
    ))
}

fn sweep_csv(args: &[&str], path: &PathBuf) -> Vec<u8> {
    let status = Command::new(BIN)
        .args(args)
        .arg("--out")
        .arg(path)
        .status()
        .expect("binary should spawn");
    assert!(status.success(), "sweep {args:?} failed");
    let bytes = std::fs::read(path).expect("CSV written");
    let _ = std::fs::remove_file(path);
    bytes
}

#[test]
fn criterion_8_cli_verify_and_reproducible_csv() {
    // The verify command runs every cross-check and exits 0.
    let output = Command::new(BIN)
        .arg("verify")
        .output()
        .expect("binary should spawn");
    let stdout = String::from_utf8_lossy(&output.stdout);
    println!("{stdout}");
    assert_eq!(
        output.status.code(),
        Some(0),
        "verify exited nonzero:\n{stdout}"
    );
    assert!(stdout.contains("verification: 7/7 passed"));

    // Precision-factor sweep regression: byte-identical across runs.
    let gsweep_args = [
        "sweep", "--n", "2", "--k", "2", "--j", "all", "--from", "0", "--to", "1", "--steps", "200",
    ];
    let a = sweep_csv(&gsweep_args, &temp_path("gsweep-a.csv"));
    let b = sweep_csv(&gsweep_args, &temp_path("gsweep-b.csv"));
    assert_eq!(a, b, "precision sweep CSV differs between runs");

    // Visibility sweep regression at fixed G.
    let vsweep_args = [
        "sweep",
        "--visibility",
        "--k",
        "2",
        "--g",
        "0.8",
        "--r",
        "0,0.3333333333333333,1",
        "--from",
        "0",
        "--to",
        "1",
        "--steps",
        "200",
    ];
    let a = sweep_csv(&vsweep_args, &temp_path("vsweep-a.csv"));
    let b = sweep_csv(&vsweep_args, &temp_path("vsweep-b.csv"));
    assert_eq!(a, b, "visibility sweep CSV differs between runs");
    println!("criterion 8 [PASS] verify exit 0; sweep CSVs byte-identical across runs");
}
