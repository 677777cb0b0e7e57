//! Runs every input document in a directory and compares the computed
//! snapshot with the stored `*.expected.json` twin.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::input::parse_input;
use crate::pipeline::{resolve_cap, run, FullRun, PipelineOptions};
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct FixtureOutcome {
    pub name: String,
    pub ok: bool,
    /// `(key, expected, got)` per disagreeing snapshot entry.
    pub mismatches: Vec<(String, Value, Value)>,
    pub missing_expected: bool,
}

/// Input documents in `dir`, sorted by name; `*.expected.json` twins are
/// skipped.
pub fn fixture_paths(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| {
            p.extension().is_some_and(|e| e == "json")
                && !p
                    .file_name()
                    .is_some_and(|n| n.to_string_lossy().ends_with(".expected.json"))
        })
        .collect();
    paths.sort();
    Ok(paths)
}

pub fn run_fixture_file(path: &Path, cli_cap: Option<usize>) -> Result<FullRun, CliError> {
    let text = std::fs::read_to_string(path)?;
    let spec = parse_input(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    let opts = PipelineOptions {
        cap: resolve_cap(cli_cap, spec.cap)?,
        ..PipelineOptions::default()
    };
    run(&spec, &opts)
}

/// Runs the snapshot comparison for every fixture in `dir`.
pub fn run_catalog(dir: &Path, cli_cap: Option<usize>) -> Result<Vec<FixtureOutcome>, CliError> {
    let mut outcomes = Vec::new();
    for path in fixture_paths(dir)? {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let full = run_fixture_file(&path, cli_cap)?;
        let snapshot = full.snapshot();
        let expected_path = path.with_file_name(format!("{name}.expected.json"));
        let outcome = match std::fs::read_to_string(&expected_path) {
            Ok(text) => {
                let expected: Value = serde_json::from_str(&text).map_err(|e| {
                    CliError::Parse(format!("{}: {e}", expected_path.display()))
                })?;
                let mismatches = compare_snapshots(&expected, &snapshot);
                FixtureOutcome {
                    name,
                    ok: mismatches.is_empty(),
                    mismatches,
                    missing_expected: false,
                }
            }
            Err(err) if err.kind() == std::io::ErrorKind::NotFound => FixtureOutcome {
                name,
                ok: false,
                mismatches: Vec::new(),
                missing_expected: true,
            },
            Err(err) => return Err(err.into()),
        };
        outcomes.push(outcome);
    }
    if outcomes.is_empty() {
        return Err(CliError::Parse(format!(
            "no fixture inputs found under {}",
            dir.display()
        )));
    }
    Ok(outcomes)
}

fn compare_snapshots(expected: &Value, got: &Value) -> Vec<(String, Value, Value)> {
    let mut mismatches = Vec::new();
    let (Some(exp), Some(act)) = (expected.as_object(), got.as_object()) else {
        return vec![("<document>".to_string(), expected.clone(), got.clone())];
    };
    let mut keys: Vec<&String> = exp.keys().collect();
    keys.sort();
    for key in keys {
        let want = &exp[key];
        let have = act.get(key).unwrap_or(&Value::Null);
        if want != have {
            mismatches.push((key.clone(), want.clone(), have.clone()));
        }
    }
    mismatches
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_comparison_reports_each_differing_key() {
        let expected = serde_json::json!({"a": 1, "b": true, "c": 2, "d": null});
        let got = serde_json::json!({"a": 1, "b": false, "d": null});
        let diff = compare_snapshots(&expected, &got);
        assert_eq!(diff.len(), 2);
        assert_eq!(diff[0].0, "b");
        assert_eq!(diff[1].0, "c");
    }
}
