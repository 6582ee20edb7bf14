//! End-to-end tests against the built binary: exit codes, output discipline,
//! and report determinism across thread counts.

use std::process::{Command, Output};

fn kdio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdio"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn strip_timestamp(s: &str) -> String {
    s.lines()
        .filter(|line| !line.contains("\"timestamp\"") && !line.starts_with("timestamp:"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn verify_valid_tuple_exits_zero_with_witnesses() {
    let out = kdio(&["verify", "--k", "3", "--tuple", "2,171,25326"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("7^3"));
    assert!(text.contains("37^3"));
    assert!(text.contains("163^3"));
}

#[test]
fn verify_invalid_tuple_exits_one() {
    let out = kdio(&["verify", "--k", "3", "--tuple", "2,171,25327"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_str(&out).contains("25327"));
}

#[test]
fn usage_errors_exit_two_and_keep_stdout_clean() {
    for args in [
        &["verify", "--k", "3", "--tuple", "2,abc"][..],
        &["verify", "--k", "1", "--tuple", "2,171"][..],
        &["cf", "--n", "124"][..],
        &["nonsense"][..],
        &["replay", "--case", "all", "--prime-cap", "3"][..],
        &["verify", "--k", "3", "--tuple", "5,2"][..],
        &["cf", "--n", "2", "--k", "4000000000", "--terms", "1"][..],
    ] {
        let out = kdio(args);
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
        assert!(out.stdout.is_empty(), "stdout not clean for {args:?}");
        assert!(!out.stderr.is_empty(), "stderr empty for {args:?}");
    }
}

#[test]
fn cf_prints_certified_quotients() {
    let out = kdio(&["cf", "--n", "124", "--k", "3", "--terms", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("[4, 1, 73, 1, 3, 1]"));
    assert!(text.contains("p_2/q_2 = 369/74"));

    let out = kdio(&["cf", "--n", "27", "--k", "3", "--terms", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pair_prints_the_construction() {
    let out = kdio(&["pair", "--a", "2", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("b   = 91"));
    assert!(text.contains("r   = 9"));
}

#[test]
fn search_reports_the_known_triple() {
    let out = kdio(&[
        "search",
        "--k",
        "3",
        "--first-max",
        "10",
        "--c-max",
        "30000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("{2, 171, 25326}"));

    let out = kdio(&[
        "search",
        "--k",
        "3",
        "--first-max",
        "30",
        "--c-max",
        "100000",
        "--power-form",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("no triples found"));
}

#[test]
fn replay_k4_json_roundtrips_and_exits_zero() {
    let out = kdio(&["replay", "--case", "k4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: kdio::ReplayReport = serde_json::from_str(&stdout_str(&out)).expect("valid JSON");
    assert!(report.closed);
    assert_eq!(report.case, "k4");
    assert_eq!(report.census["k4_r_values"], 31);
    assert_eq!(report.records.len(), 31);
    // parse(serialize(report)) == report
    let reserialized = serde_json::to_string_pretty(&report).unwrap();
    let reparsed: kdio::ReplayReport = serde_json::from_str(&reserialized).unwrap();
    assert_eq!(reparsed, report);
}

#[test]
fn replay_k3_reports_the_census() {
    let out = kdio(&["replay", "--case", "k3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: kdio::ReplayReport = serde_json::from_str(&stdout_str(&out)).expect("valid JSON");
    assert!(report.closed);
    assert_eq!(report.census["k3_candidates"], 1892);
}

#[test]
fn replay_primes_case_alone() {
    let out = kdio(&[
        "replay",
        "--case",
        "primes",
        "--prime-cap",
        "50",
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("primes_checked: 13"));
    assert!(text.contains("closed: true"));
}

#[test]
fn replay_out_file_matches_stdout_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = kdio(&[
        "replay",
        "--case",
        "k4",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, out.stdout);
}

#[test]
fn replay_is_deterministic_across_thread_counts() {
    let one = kdio(&[
        "replay",
        "--case",
        "k4",
        "--format",
        "json",
        "--threads",
        "1",
    ]);
    let four = kdio(&[
        "replay",
        "--case",
        "k4",
        "--format",
        "json",
        "--threads",
        "4",
    ]);
    let again = kdio(&[
        "replay",
        "--case",
        "k4",
        "--format",
        "json",
        "--threads",
        "4",
    ]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(
        strip_timestamp(&stdout_str(&one)),
        strip_timestamp(&stdout_str(&four))
    );
    assert_eq!(
        strip_timestamp(&stdout_str(&four)),
        strip_timestamp(&stdout_str(&again))
    );
}

#[test]
fn replay_csv_has_one_row_per_record() {
    let out = kdio(&["replay", "--case", "k4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,r,a,b,verdict,evidence"));
    assert_eq!(text.lines().count(), 32); // header + 31 records
    assert!(text.contains("quotient_threshold=703123"));
}

#[test]
fn cf_max_p_stops_at_the_cutoff() {
    let out = kdio(&["cf", "--n", "124", "--k", "3", "--max-p", "1000000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    assert!(text.contains("stopped at j = 8"));
    assert!(text.contains("111381743"));
}

#[test]
fn precision_cap_env_is_honored() {
    // A tiny cap clamps to the 32-bit floor; the lambda enclosure stays
    // sound but cannot be refined below roughly 2^-25, while the default
    // cap drives it far below 1e-20.
    let lambda_width = |out: &Output| {
        let value: serde_json::Value = serde_json::from_str(&stdout_str(out)).unwrap();
        let lo: f64 = value["lambda"]["lo"].as_str().unwrap().parse().unwrap();
        let hi: f64 = value["lambda"]["hi"].as_str().unwrap().parse().unwrap();
        assert!(lo <= 2.7224 && 2.7223 <= hi, "lambda enclosure must stay sound");
        hi - lo
    };
    let capped = Command::new(env!("CARGO_BIN_EXE_kdio"))
        .args(["bounds", "--k", "3", "--r", "5", "--format", "json"])
        .env("KDIO_MAX_PRECISION_BITS", "8")
        .output()
        .expect("binary runs");
    assert_eq!(capped.status.code(), Some(0));
    assert!(lambda_width(&capped) > 1e-9);

    let default = kdio(&["bounds", "--k", "3", "--r", "5", "--format", "json"]);
    assert!(lambda_width(&default) < 1e-20);
}

#[test]
fn bounds_json_reports_the_envelope() {
    let out = kdio(&["bounds", "--k", "4", "--r", "35", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["n"], 4);
    assert_eq!(value["N"], "1500624");
    assert_eq!(value["condition_holds"], true);
    assert_eq!(value["mu"]["exact"], true);
    assert_eq!(value["mu"]["lo"], "2");
    let hi = value["lambda"]["hi"].as_str().unwrap();
    assert!(hi.starts_with("2.30742"), "lambda hi = {hi}");

    let out = kdio(&["bounds", "--k", "3", "--r", "2", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("condition_holds: false"));
}
