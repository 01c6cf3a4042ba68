//! End-to-end checks of the binary: argument handling, text output, CSV
//! output, config-file layering, and exit codes.

use std::path::PathBuf;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_chainstar");

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn run(args: &[&str]) -> Run {
    let output = Command::new(BIN)
        .args(args)
        .output()
        .expect("binary should spawn");
    Run {
        stdout: String::from_utf8(output.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(output.stderr).expect("utf-8 stderr"),
        code: output.status.code().expect("exit code"),
    }
}

/// Pulls the number following `key` (e.g. "S=") from the first line
/// containing it.
fn extract(text: &str, key: &str) -> f64 {
    let line = text
        .lines()
        .find(|l| l.contains(key))
        .unwrap_or_else(|| panic!("no line with '{key}' in:\n{text}"));
    let start = line.find(key).expect("key located") + key.len();
    let rest = &line[start..];
    let end = rest
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == 'e'))
        .unwrap_or(rest.len());
    rest[..end]
        .parse()
        .unwrap_or_else(|_| panic!("bad number after '{key}' in '{line}'"))
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("chainstar-test-{}-{name}", std::process::id()))
}

#[test]
fn bound_all_selections_at_optimum() {
    let run = run(&[
        "bound", "--n", "2", "--m", "2", "--k", "2", "--g", "0.8", "--j", "all",
    ]);
    assert_eq!(run.code, 0);
    let rows: Vec<&str> = run.stdout.lines().collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert!(row.contains("S=1.131371"), "row: {row}");
        assert!(row.contains("violated=yes"));
    }
    assert!(run.stderr.contains("# scenario: n=2 m=2 k=2"));
    assert!(run.stderr.contains("# selections: 11 12 21 22"));
}

#[test]
fn bound_bare_chain() {
    let run = run(&["bound", "--n", "1", "--m", "1", "--k", "3"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("S=2.598076"), "{}", run.stdout);
}

#[test]
fn bound_three_observer_chain() {
    let run = run(&[
        "bound",
        "--n",
        "2",
        "--m",
        "3",
        "--k",
        "2",
        "--g",
        "0.6897,0.8",
        "--j",
        "3,3",
    ]);
    assert_eq!(run.code, 0);
    let s = extract(&run.stdout, "S=");
    assert!((s - 0.9753).abs() < 1e-3, "S = {s}");
    assert!(run.stdout.contains("violated=no"));
}

#[test]
fn simulate_agrees_with_bound() {
    let args = [
        "--n", "2", "--m", "2", "--k", "3", "--g", "0.75", "--j", "all",
    ];
    let bound = run(&[&["bound"], &args[..]].concat());
    let simulate = run(&[&["simulate"], &args[..]].concat());
    assert_eq!(bound.code, 0);
    assert_eq!(simulate.code, 0);
    for (b, s) in bound.stdout.lines().zip(simulate.stdout.lines()) {
        let vb = extract(b, "S=");
        let vs = extract(s, "S=");
        assert!((vb - vs).abs() < 1e-6, "{b} vs {s}");
    }
    // The simulation path also reports the I_l terms.
    assert!(simulate.stdout.lines().all(|l| l.contains("I=[")));
}

#[test]
fn simulate_full_visibility_kills_noise() {
    let run = run(&[
        "simulate", "--n", "2", "--m", "2", "--k", "2", "--g", "0.8", "--j", "1,1", "--noise",
        "1.0,0.5",
    ]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("S=1.131371"), "{}", run.stdout);
}

#[test]
fn simulate_at_critical_visibility() {
    let run = run(&[
        "simulate", "--n", "2", "--m", "2", "--k", "2", "--g", "0.8", "--j", "1,1", "--noise",
        "0.8839,0",
    ]);
    assert_eq!(run.code, 0);
    let s = extract(&run.stdout, "S=");
    assert!((s - 1.0).abs() < 1e-4, "S = {s}");
}

#[test]
fn visibility_white_noise() {
    let run = run(&["visibility", "--k", "2", "--r", "0"]);
    assert_eq!(run.code, 0);
    let v = extract(&run.stdout, "critical_visibility=");
    assert!((v - 0.883883).abs() < 2e-6, "v = {v}");
}

#[test]
fn visibility_impossible_case() {
    let run = run(&["visibility", "--k", "4", "--r", "0"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("no simultaneous violation"));
}

#[test]
fn window_subset_of_324() {
    let run = run(&["window", "--n", "3", "--k", "4", "--j", "111,112,121,211"]);
    assert_eq!(run.code, 0);
    let lo = extract(&run.stdout, "lo=");
    let hi = extract(&run.stdout, "hi=");
    let g_star = extract(&run.stdout, "g_star=");
    let v_star = extract(&run.stdout, "v_star=");
    assert!((lo - 0.8280).abs() < 1e-4);
    assert!((hi - 0.9970).abs() < 1e-4);
    assert!((g_star - 0.942809).abs() < 1e-6);
    assert!((v_star - 3.104041).abs() < 1e-4);
}

#[test]
fn window_empty_for_k4() {
    let run = run(&["window", "--n", "2", "--k", "4"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("window: empty"));
    let v_star = extract(&run.stdout, "v_star=");
    assert!((v_star - 2.956414).abs() < 1e-5);
}

#[test]
fn m3check_equalization() {
    let run = run(&["m3check", "--k", "2"]);
    assert_eq!(run.code, 0);
    let g1 = extract(&run.stdout, "g1=");
    let g2 = extract(&run.stdout, "g2=");
    let value = extract(&run.stdout, "value=");
    assert!((g1 - 20.0 / 29.0).abs() < 1e-4);
    assert!((g2 - 0.8).abs() < 1e-4);
    assert!((value - 0.9753).abs() < 1e-3);
}

#[test]
fn invalid_inputs_exit_one() {
    for args in [
        &["bound", "--n", "2", "--m", "2", "--k", "2", "--g", "1.5"][..],
        &["bound", "--n", "0"][..],
        &["bound", "--k", "1"][..],
        &["bound", "--j", "13"][..],
        &["bound", "--g", "0.6", "--f", "0.9"][..],
        &["sweep", "--m", "3"][..],
        &["sweep", "--g", "0.8"][..],
        &["simulate", "--noise", "0.5"][..],
        &["bound", "--unknown-flag"][..],
    ] {
        let run = run(args);
        assert_eq!(run.code, 1, "args {args:?} gave exit {}", run.code);
    }
}

#[test]
fn explicit_quality_factor_off_the_boundary() {
    // F = 0.5 with G = 0.6 sits inside the physical region; the bound picks
    // up G at the weak target, independent of F there.
    let first = run(&[
        "bound", "--n", "1", "--m", "2", "--k", "2", "--g", "0.6", "--f", "0.5", "--j", "1",
    ]);
    assert_eq!(first.code, 0);
    let s = extract(&first.stdout, "S=");
    assert!((s - 2.0f64.sqrt() * 0.6).abs() < 1e-5);
    // The second observer sees (1+F)/2 = 0.75 instead.
    let second = run(&[
        "bound", "--n", "1", "--m", "2", "--k", "2", "--g", "0.6", "--f", "0.5", "--j", "2",
    ]);
    let s = extract(&second.stdout, "S=");
    assert!((s - 2.0f64.sqrt() * 0.75).abs() < 1e-5);
}

#[test]
fn bound_csv_output() {
    let path = temp_path("bound.csv");
    let run = run(&[
        "bound",
        "--n",
        "2",
        "--m",
        "2",
        "--k",
        "2",
        "--g",
        "0.8",
        "--j",
        "all",
        "--out",
        path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(run.code, 0);
    let csv = std::fs::read_to_string(&path).expect("CSV written");
    let _ = std::fs::remove_file(&path);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "j,s,classical_bound,violated");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1], "11,1.13137085,1,true");
    assert!(!csv.contains('\r'));
    assert!(!csv.lines().any(|l| l.ends_with(',')));
}

#[test]
fn sweep_csv_shape() {
    let run = run(&[
        "sweep", "--n", "2", "--k", "2", "--j", "all", "--from", "0", "--to", "1", "--steps", "10",
    ]);
    assert_eq!(run.code, 0);
    let lines: Vec<&str> = run.stdout.lines().collect();
    assert_eq!(
        lines[0],
        "g,s11,s12,s21,s22,classical_bound,min_s,all_violated"
    );
    assert_eq!(lines.len(), 12);
    assert!(lines[1].starts_with("0,0,"));
    assert!(lines[11].starts_with("1,"));
    // The G = 0.8 row holds the maximal simultaneous violation everywhere.
    assert_eq!(
        lines[9],
        "0.8,1.13137085,1.13137085,1.13137085,1.13137085,1,1.13137085,true"
    );
}

#[test]
fn visibility_sweep_csv_shape() {
    let run = run(&[
        "sweep",
        "--visibility",
        "--k",
        "2",
        "--g",
        "0.8",
        "--r",
        "0,1",
        "--from",
        "0",
        "--to",
        "1",
        "--steps",
        "4",
    ]);
    assert_eq!(run.code, 0);
    let lines: Vec<&str> = run.stdout.lines().collect();
    assert_eq!(lines[0], "v,s_r0,s_r1");
    assert_eq!(lines.len(), 6);
    // v = 1 row reproduces the noiseless optimum in both columns.
    assert!(lines[5].starts_with("1,1.13137085,1.13137085"));
}

#[test]
fn config_file_with_branch_sections() {
    let path = temp_path("run.conf");
    std::fs::write(
        &path,
        "n = 2\nm = 2\nk = 2\nj = 11\n[branch 1]\ng = 0.8\nv = 0.9\nr = 0.5\n[branch 2]\ng = 0.7\n",
    )
    .expect("config written");
    let run = run(&["simulate", "--config", path.to_str().expect("utf-8 path")]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stderr.contains("# branch 1: G=[0.8]"));
    assert!(run.stderr.contains("# branch 2: G=[0.7]"));
    assert!(run.stderr.contains("(v=0.9, r=0.5) (v=1, r=0)"));
    // Heterogeneous G with branch-1 noise: S = C_2 sqrt(0.8 * 0.7 * w) with
    // w = 0.9 + 0.1 * 0.5 * 0.5 (the k = 2 colored bracket).
    let s = extract(&run.stdout, "S=");
    let want = 2.0f64.sqrt() * (0.8 * 0.7 * 0.925f64).sqrt();
    assert!((s - want).abs() < 1e-5, "S = {s} want {want}");
}

#[test]
fn flags_override_config_file() {
    let path = temp_path("override.conf");
    std::fs::write(&path, "n = 2\nm = 2\nk = 2\ng = 0.5\n").expect("config written");
    let run = run(&[
        "bound",
        "--config",
        path.to_str().expect("utf-8 path"),
        "--g",
        "0.8",
        "--j",
        "11",
    ]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("S=1.131371"), "{}", run.stdout);
}

#[test]
fn noise_file_per_source() {
    let path = temp_path("noise.txt");
    std::fs::write(&path, "# per-source noise\n1.0 0.0\n0.5 1.0\n").expect("noise written");
    let run = run(&[
        "simulate",
        "--n",
        "2",
        "--m",
        "2",
        "--k",
        "2",
        "--g",
        "0.8",
        "--j",
        "1,1",
        "--noise-file",
        path.to_str().expect("utf-8 path"),
    ]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(run.code, 0);
    // Branch 2 carries v = 0.5, r = 1: bracket (2v + r(1-v))/2 = 0.75.
    let s = extract(&run.stdout, "S=");
    let want = 2.0f64.sqrt() * 0.8 * (0.75f64).sqrt();
    assert!((s - want).abs() < 1e-5, "S = {s} want {want}");
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["--version"]).code, 0);
    assert_eq!(run(&["bound", "--help"]).code, 0);
}
