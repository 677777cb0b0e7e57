//! End-to-end checks of the binary: verbs, flags, output shape, and the
//! exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypertope"))
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn check_reports_the_s4_baseline() {
    let out = bin().arg("check").arg(fixture("s4_cgroup.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("element counts: [4, 6, 4]"), "{text}");
    assert!(text.contains("verdict: regular_hypertope"), "{text}");
}

#[test]
fn quiet_check_prints_only_the_verdict() {
    let out = bin()
        .args(["check", "--quiet"])
        .arg(fixture("f20_chiral.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "chiral_hypertope\n");
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    let run = || {
        bin()
            .args(["check", "--json"])
            .arg(fixture("a5_cplus.json"))
            .output()
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["verdicts"]["hypertope_verdict"], "regular_hypertope");
    assert_eq!(report["timing"], serde_json::Value::Null);
}

#[test]
fn report_sections_come_in_the_mandated_order() {
    let out = bin()
        .args(["check", "--json"])
        .arg(fixture("s4_cgroup.json"))
        .output()
        .unwrap();
    let text = stdout(&out);
    let order = [
        "\"input\"",
        "\"group\"",
        "\"parabolics\"",
        "\"criteria\"",
        "\"geometry\"",
        "\"classification\"",
        "\"verdicts\"",
        "\"witnesses\"",
        "\"timing\"",
    ];
    let positions: Vec<usize> = order
        .iter()
        .map(|needle| text.find(needle).unwrap_or_else(|| panic!("missing {needle}")))
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
}

#[test]
fn timing_flag_fills_the_timing_section() {
    let out = bin()
        .args(["check", "--json", "--timing"])
        .arg(fixture("s4_cgroup.json"))
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["timing"]["total_ms"].is_number());
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("parse error"), "{}", stderr(&out));
}

#[test]
fn unknown_mode_exits_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mode.json");
    std::fs::write(&path, r#"{"degree":3,"mode":"spin","generators":["(0 1)"]}"#).unwrap();
    let out = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mode"), "{}", stderr(&out));
}

#[test]
fn group_cap_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.json");
    std::fs::write(
        &path,
        r#"{"degree":5,"mode":"cgroup","generators":["(0 1)","(1 2)","(2 3)","(3 4)"]}"#,
    )
    .unwrap();
    let out = bin().args(["check", "--cap", "30"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("cap"), "{}", stderr(&out));
}

#[test]
fn cap_precedence_is_flag_then_file_then_environment() {
    let dir = tempfile::tempdir().unwrap();
    let with_file_cap = dir.path().join("filecap.json");
    std::fs::write(
        &with_file_cap,
        r#"{"degree":5,"mode":"cgroup","generators":["(0 1)","(1 2)","(2 3)","(3 4)"],"cap":10}"#,
    )
    .unwrap();
    let without = dir.path().join("nocap.json");
    std::fs::write(
        &without,
        r#"{"degree":5,"mode":"cgroup","generators":["(0 1)","(1 2)","(2 3)","(3 4)"]}"#,
    )
    .unwrap();

    // Environment cap too small fails the closure…
    let out = bin()
        .arg("check")
        .arg(&without)
        .env("HYPERTOPE_CAP", "20")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // …but the command-line flag overrides it…
    let out = bin()
        .args(["check", "--cap", "200"])
        .arg(&without)
        .env("HYPERTOPE_CAP", "20")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    // …and a file cap beats a generous environment.
    let out = bin()
        .arg("check")
        .arg(&with_file_cap)
        .env("HYPERTOPE_CAP", "100000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    // An unusable environment value is a parse error.
    let out = bin()
        .arg("check")
        .arg(&without)
        .env("HYPERTOPE_CAP", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_on_a_non_geometry_exits_4() {
    let out = bin()
        .arg("classify")
        .arg(fixture("s4_nongeometry.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stdout(&out), "not_a_geometry\n");
}

#[test]
fn missing_input_file_exits_1() {
    let out = bin().arg("check").arg("definitely_missing.json").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn catalog_accepts_the_shipped_fixtures() {
    let out = bin()
        .arg("catalog")
        .arg("--dir")
        .arg(fixtures_dir())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("s4_cgroup: ok"), "{text}");
    assert!(text.contains("10 fixtures, 10 ok, 0 failing"), "{text}");
}

#[test]
fn catalog_flags_a_snapshot_mismatch_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("s4_cgroup.json"), dir.path().join("s4_cgroup.json")).unwrap();
    let expected = std::fs::read_to_string(fixture("s4_cgroup.expected.json")).unwrap();
    let tampered = expected.replace("\"group_order\": 24", "\"group_order\": 25");
    assert_ne!(expected, tampered);
    std::fs::write(dir.path().join("s4_cgroup.expected.json"), tampered).unwrap();
    let out = bin().arg("catalog").arg("--dir").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("mismatch group_order"), "{}", stdout(&out));
}

#[test]
fn export_dot_emits_the_whole_graph_by_default() {
    let out = bin()
        .arg("export-dot")
        .arg(fixture("s4_cgroup.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("graph \"s4_cgroup\""), "{text}");
    // 4 + 6 + 4 elements.
    assert_eq!(text.matches("label=").count(), 14, "{text}");
}

#[test]
fn export_dot_rejects_a_bad_residue_selector() {
    for selector in ["7", "0,0", "x"] {
        let out = bin()
            .arg("export-dot")
            .arg(fixture("s4_cgroup.json"))
            .args(["--residue", selector])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "selector {selector:?}");
    }
}

#[test]
fn theorem_suite_passes_on_the_catalog_alone() {
    let out = bin()
        .arg("verify-main-theorem")
        .arg("--dir")
        .arg(fixtures_dir())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result: OK (0 violations)"), "{text}");
    assert!(text.contains("1 chiral (1 rc-confirmed)"), "{text}");
}

#[test]
fn unknown_subcommands_and_flags_exit_2() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["check", "--wat"]).arg(fixture("s4_cgroup.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
