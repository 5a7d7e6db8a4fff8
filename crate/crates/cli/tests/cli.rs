use std::path::Path;
use std::process::{Command, Output};

use clap::CommandFactory;
use hamwalk_cli::Cli;

fn hamwalk(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamwalk"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn argument_definitions_are_consistent() {
    Cli::command().debug_assert();
}

#[test]
fn small_widths_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(&["gen-code", "--n", "2", "--seed", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("3..="));
    let out = hamwalk(&["stoptime", "--n", "2..5", "--seed", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_is_required_for_generation() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        hamwalk(&["gen-code", "--n", "4"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn gen_code_reports_balance() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(
        &["gen-code", "--n", "4", "--seed", "0", "--out", "code.txt"],
        dir.path(),
    );
    assert!(out.status.success());
    let report = text(&out.stderr);
    assert!(report.starts_with("# hamwalk gen-code --n 4 --seed 0"));
    assert!(report.contains("class: totally_balanced"));
    let code = std::fs::read_to_string(dir.path().join("code.txt")).unwrap();
    assert_eq!(code.trim().split(',').count(), 16);
}

#[test]
fn gen_code_codewords() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(
        &[
            "gen-code",
            "--n",
            "3",
            "--seed",
            "1",
            "--format",
            "codewords",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let lines: Vec<String> = text(&out.stdout).lines().map(str::to_owned).collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|l| l.len() == 3));
}

#[test]
fn gen_fun_echoes_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(&["gen-fun", "--fixture", "a"], dir.path());
    assert!(out.status.success());
    assert_eq!(
        text(&out.stdout).trim(),
        "[13, 10, 9, 14, 3, 11, 1, 12, 15, 4, 7, 5, 2, 6, 0, 8]"
    );
}

#[test]
fn gen_fun_output_reloads_as_file_fixture() {
    let dir = tempfile::tempdir().unwrap();
    assert!(hamwalk(
        &["gen-fun", "--n", "5", "--seed", "4", "--out", "f.txt"],
        dir.path()
    )
    .status
    .success());
    let out = hamwalk(&["analyze", "--fixture", "f.txt"], dir.path());
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("doubly_stochastic: true"));
}

#[test]
fn analyze_fixture_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(
        &["analyze", "--fixture", "a", "--format", "json"],
        dir.path(),
    );
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["practical_b"], 64);
    assert_eq!(report["strongly_connected"], true);
    assert_eq!(report["doubly_stochastic"], true);
}

#[test]
fn analyze_negation_even_walks() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(
        &["analyze", "--fixture", "negation", "--b", "2,4,6"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let report = text(&out.stdout);
    for b in [2, 4, 6] {
        assert!(report.contains(&format!("strongly_connected(gamma_{b}): false")));
    }
}

#[test]
fn analysis_cap_refuses_large_maps() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(&["analyze", "--n", "12", "--seed", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("analysis limited"));
}

#[test]
fn missing_fixture_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(&["gen-fun", "--fixture", "nowhere.txt"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stoptime_parallel_matches_serial() {
    let dir = tempfile::tempdir().unwrap();
    let serial = hamwalk(
        &["stoptime", "--n", "4,6", "--seed", "7", "--trials", "300"],
        dir.path(),
    );
    let parallel = hamwalk(
        &[
            "stoptime",
            "--n",
            "4,6",
            "--seed",
            "7",
            "--trials",
            "300",
            "--parallel",
        ],
        dir.path(),
    );
    assert!(serial.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
    let csv = text(&serial.stdout);
    assert!(csv.starts_with("n,mean,std_error,bound,curve\n4,"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn bits_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(
        &[
            "bits",
            "--fixture",
            "a",
            "--b",
            "64",
            "--count",
            "100000",
            "--format",
            "packed",
            "--out",
            "bits.bin",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert_eq!(
        std::fs::metadata(dir.path().join("bits.bin"))
            .unwrap()
            .len(),
        12_500
    );
    let report = text(&out.stderr);
    assert!(report.contains("monobit:") && report.contains("chi_square:"));
}

#[test]
fn bits_default_walk_length_is_measured() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(
        &[
            "bits",
            "--fixture",
            "a",
            "--count",
            "1000",
            "--out",
            "bits.txt",
        ],
        dir.path(),
    );
    assert!(text(&out.stderr).contains("walk_length: 64"));
    let ascii = std::fs::read_to_string(dir.path().join("bits.txt")).unwrap();
    assert_eq!(
        ascii.chars().filter(|c| *c == '0' || *c == '1').count(),
        1000
    );
}

#[test]
fn metric_demo_prints_both_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = hamwalk(&["metric-demo"], dir.path());
    let stdout = text(&out.stdout);
    assert!(stdout.contains("computed: 0.01 0004000000000000000000 01 1005"));
    assert!(stdout.contains("computed: 0.5 2263667 0 5600000"));
}
