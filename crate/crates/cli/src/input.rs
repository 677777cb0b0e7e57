//! Input documents: one JSON object per run describing a group and how to
//! derive its parabolic subgroups.

use hypertope::Permutation;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// How the parabolic family is obtained from the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One subgroup per generator position, generated by all the others.
    Cgroup,
    /// Twist construction over the given generators with a silent leading
    /// identity.
    Cplus,
    /// Subgroups listed verbatim.
    Explicit,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Cgroup => "cgroup",
            Mode::Cplus => "cplus",
            Mode::Explicit => "explicit",
        }
    }
}

/// A permutation literal: cycle text, image text, or an image array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PermLiteral {
    Text(String),
    Images(Vec<u32>),
}

impl PermLiteral {
    fn parse(&self, degree: usize) -> Result<Permutation, String> {
        match self {
            PermLiteral::Text(text) => {
                Permutation::parse(degree, text).map_err(|e| e.to_string())
            }
            PermLiteral::Images(images) => {
                Permutation::from_images(images.clone()).map_err(|e| e.to_string()).and_then(|p| {
                    if p.degree() == degree {
                        Ok(p)
                    } else {
                        Err(format!("expected degree {degree}, got {}", p.degree()))
                    }
                })
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    degree: usize,
    mode: String,
    #[serde(default)]
    generators: Option<Vec<PermLiteral>>,
    #[serde(default)]
    subgroups: Option<Vec<Vec<PermLiteral>>>,
    #[serde(default)]
    cap: Option<usize>,
}

/// A validated run description.
#[derive(Debug, Clone)]
pub struct InputSpec {
    pub degree: usize,
    pub mode: Mode,
    pub generators: Vec<Permutation>,
    pub subgroups: Vec<Vec<Permutation>>,
    pub cap: Option<usize>,
    /// The generators exactly as written, for echoing into reports.
    pub raw_generators: Value,
    pub raw_subgroups: Option<Value>,
}

/// Parses and validates one input document, collecting every field error
/// rather than stopping at the first.
pub fn parse_input(text: &str) -> Result<InputSpec, CliError> {
    let raw: RawInput = serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("invalid input document: {e}")))?;
    let mut errors: Vec<String> = Vec::new();

    let mode = match raw.mode.as_str() {
        "cgroup" => Some(Mode::Cgroup),
        "cplus" => Some(Mode::Cplus),
        "explicit" => Some(Mode::Explicit),
        other => {
            errors.push(format!(
                "mode: expected one of \"cplus\", \"cgroup\", \"explicit\", got {other:?}"
            ));
            None
        }
    };
    if raw.degree == 0 {
        errors.push("degree: must be at least 1".to_string());
    }

    let raw_generators = raw.generators.as_deref().unwrap_or(&[]);
    let mut generators = Vec::with_capacity(raw_generators.len());
    for (k, lit) in raw_generators.iter().enumerate() {
        match lit.parse(raw.degree.max(1)) {
            Ok(p) => generators.push(p),
            Err(e) => errors.push(format!("generators[{k}]: {e}")),
        }
    }

    let raw_subgroups: &[Vec<PermLiteral>] = raw.subgroups.as_deref().unwrap_or(&[]);
    let mut subgroups = Vec::with_capacity(raw_subgroups.len());
    for (s, sub) in raw_subgroups.iter().enumerate() {
        let mut parsed = Vec::with_capacity(sub.len());
        for (k, lit) in sub.iter().enumerate() {
            match lit.parse(raw.degree.max(1)) {
                Ok(p) => parsed.push(p),
                Err(e) => errors.push(format!("subgroups[{s}][{k}]: {e}")),
            }
        }
        subgroups.push(parsed);
    }

    match mode {
        Some(Mode::Cgroup) | Some(Mode::Cplus) => {
            if raw_generators.is_empty() {
                errors.push("generators: required and nonempty for this mode".to_string());
            }
            if raw.subgroups.is_some() {
                errors.push("subgroups: only allowed in \"explicit\" mode".to_string());
            }
        }
        Some(Mode::Explicit) if raw_subgroups.is_empty() => {
            errors.push("subgroups: required and nonempty in \"explicit\" mode".to_string());
        }
        _ => {}
    }
    if !errors.is_empty() {
        return Err(CliError::Parse(errors.join("; ")));
    }

    let echo: Value = serde_json::from_str(text).expect("already parsed once");
    Ok(InputSpec {
        degree: raw.degree,
        mode: mode.expect("mode validated"),
        generators,
        subgroups,
        cap: raw.cap,
        raw_generators: echo.get("generators").cloned().unwrap_or(Value::Null),
        raw_subgroups: echo.get("subgroups").cloned(),
    })
}
