//! Command-line surface over the coset-geometry toolkit: one verb per
//! question (full report, classification, DOT export, fixture catalog,
//! theorem suite), JSON or text output, and stable exit codes.

pub mod catalog;
pub mod input;
pub mod pipeline;
pub mod report;
pub mod search;
pub mod theorem;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use hypertope::coset::CosetError;
use hypertope::criteria::CriteriaError;
use hypertope::group::GroupError;
use hypertope::incidence::{Flag, IncidenceError};
use hypertope::symmetry::SymmetryError;
use hypertope::PermError;

use crate::input::{parse_input, InputSpec};
use crate::pipeline::{resolve_cap, run, FullRun, PipelineOptions};
use crate::search::SearchConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Failure(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("the input does not define a geometry")]
    NotAGeometry,
    #[error("{0} theorem violation(s)")]
    TheoremViolation(usize),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Failure(_) => 1,
            CliError::Parse(_) => 2,
            CliError::CapExceeded(_) => 3,
            CliError::NotAGeometry => 4,
            CliError::TheoremViolation(_) => 5,
            CliError::Internal(_) => 6,
        }
    }
}

impl From<GroupError> for CliError {
    fn from(err: GroupError) -> Self {
        match err {
            GroupError::CapExceeded { .. } => CliError::CapExceeded(err.to_string()),
            GroupError::NotAMember(_) | GroupError::ParentMismatch | GroupError::Perm(_) => {
                CliError::Parse(err.to_string())
            }
        }
    }
}

impl From<PermError> for CliError {
    fn from(err: PermError) -> Self {
        CliError::Parse(err.to_string())
    }
}

impl From<IncidenceError> for CliError {
    fn from(err: IncidenceError) -> Self {
        match err {
            IncidenceError::FlagBudgetExceeded { .. } => CliError::CapExceeded(err.to_string()),
            IncidenceError::RankTooLarge(_) => CliError::Parse(err.to_string()),
            _ => CliError::Internal(err.to_string()),
        }
    }
}

impl From<CosetError> for CliError {
    fn from(err: CosetError) -> Self {
        match err {
            CosetError::Group(inner) => inner.into(),
            CosetError::Incidence(inner) => inner.into(),
            CosetError::NoAdjacentChamber { .. } => CliError::Internal(err.to_string()),
            _ => CliError::Parse(err.to_string()),
        }
    }
}

impl From<SymmetryError> for CliError {
    fn from(err: SymmetryError) -> Self {
        match err {
            SymmetryError::TooLarge { .. } | SymmetryError::SearchBudgetExceeded { .. } => {
                CliError::CapExceeded(err.to_string())
            }
            SymmetryError::InternalInconsistency(_) => CliError::Internal(err.to_string()),
            SymmetryError::Incidence(inner) => inner.into(),
        }
    }
}

impl From<CriteriaError> for CliError {
    fn from(err: CriteriaError) -> Self {
        match err {
            CriteriaError::Coset(inner) => inner.into(),
            CriteriaError::Incidence(inner) => inner.into(),
            CriteriaError::InternalDisagreement { .. } => CliError::Internal(err.to_string()),
            _ => CliError::Parse(err.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hypertope", version, about = "Coset incidence geometries from finite permutation groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Override the group element cap (beats the file cap and HYPERTOPE_CAP)
    #[arg(long, global = true)]
    pub cap: Option<usize>,
    /// Emit machine-readable JSON
    #[arg(long, global = true)]
    pub json: bool,
    /// Print only the essential result
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Include timing in reports (off by default so output is reproducible)
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline on one input document and print the report
    Check { file: PathBuf },
    /// Print only the classification and hypertope verdict
    Classify { file: PathBuf },
    /// Print DOT for the whole system, or for a base-flag residue
    ExportDot {
        file: PathBuf,
        /// Comma-separated types selecting base-chamber elements; empty
        /// selects the whole system
        #[arg(long, default_value = "", value_name = "TYPES")]
        residue: String,
    },
    /// Run every fixture in a directory against its stored snapshot
    Catalog {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
    /// Assert the chirality theorem over the catalog and an optional search
    VerifyMainTheorem {
        /// Also search generator tuples in the built-in small groups
        #[arg(long)]
        search: bool,
        /// Skip built-in groups above this order
        #[arg(long, default_value_t = 60)]
        max_order: usize,
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
}

fn load_and_run(file: &Path, cli_cap: Option<usize>) -> Result<(InputSpec, FullRun), CliError> {
    let text = std::fs::read_to_string(file)?;
    let spec = parse_input(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", file.display())),
        other => other,
    })?;
    let opts = PipelineOptions {
        cap: resolve_cap(cli_cap, spec.cap)?,
        ..PipelineOptions::default()
    };
    let full = run(&spec, &opts)?;
    Ok((spec, full))
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Check { ref file } => {
            let (spec, full) = load_and_run(file, cli.cap)?;
            if cli.quiet {
                println!("{}", full.verdict.as_str());
            } else if cli.json {
                let report = full.report(&spec, cli.timing);
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", render_check(&full, cli.timing));
            }
            Ok(())
        }
        Command::Classify { ref file } => {
            let (_, full) = load_and_run(file, cli.cap)?;
            let Some(analysis) = full.analysis.as_ref() else {
                println!("{}", full.verdict.as_str());
                return Err(CliError::NotAGeometry);
            };
            if cli.quiet {
                println!("{}", full.verdict.as_str());
            } else if cli.json {
                let body = serde_json::json!({
                    "classification": analysis.classification.kind.as_str(),
                    "hypertope_verdict": full.verdict.as_str(),
                    "aut_order": analysis.aut.order(),
                    "aut_chamber_orbit_count": analysis.classification.orbit_count,
                });
                println!("{}", serde_json::to_string_pretty(&body).expect("body serializes"));
            } else {
                println!("classification: {}", analysis.classification.kind.as_str());
                println!("verdict: {}", full.verdict.as_str());
            }
            Ok(())
        }
        Command::ExportDot {
            ref file,
            ref residue,
        } => {
            let (_, full) = load_and_run(file, cli.cap)?;
            let stem = file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "geometry".to_string());
            let types = parse_residue_selector(residue, full.rank())?;
            if types.is_empty() {
                print!("{}", full.built.system().to_dot(&stem));
            } else {
                let base = full.built.base_chamber();
                let elements: Vec<u32> = types.iter().map(|&t| base.elements()[t]).collect();
                let flag = Flag::from_elements(elements);
                let residue = full.built.system().residue(&flag)?;
                let suffix: Vec<String> = types.iter().map(|t| t.to_string()).collect();
                let name = format!("{stem}_residue_t{}", suffix.join("_"));
                print!("{}", residue.system.to_dot(&name));
            }
            Ok(())
        }
        Command::Catalog { ref dir } => {
            let outcomes = catalog::run_catalog(dir, cli.cap)?;
            let failed = outcomes.iter().filter(|o| !o.ok).count();
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&outcomes).expect("outcomes serialize")
                );
            } else {
                for outcome in &outcomes {
                    if outcome.ok {
                        if !cli.quiet {
                            println!("{}: ok", outcome.name);
                        }
                    } else if outcome.missing_expected {
                        println!("{}: missing expected snapshot", outcome.name);
                    } else {
                        for (key, expected, got) in &outcome.mismatches {
                            println!("{}: mismatch {key}: expected {expected}, got {got}", outcome.name);
                        }
                    }
                }
                println!("{} fixtures, {} ok, {} failing", outcomes.len(), outcomes.len() - failed, failed);
            }
            if failed > 0 {
                return Err(CliError::Failure(format!(
                    "{failed} of {} fixtures disagree with stored snapshots",
                    outcomes.len()
                )));
            }
            Ok(())
        }
        Command::VerifyMainTheorem {
            search,
            max_order,
            ref dir,
        } => {
            let config = search.then_some(SearchConfig { max_order });
            let report = theorem::verify_main_theorem(dir, config, cli.cap)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else if cli.quiet {
                println!(
                    "result: {} ({} violations)",
                    if report.ok { "OK" } else { "THEOREM-VIOLATION" },
                    report.violations.len()
                );
            } else {
                print!("{}", report.render_text());
            }
            if report.ok {
                Ok(())
            } else {
                Err(CliError::TheoremViolation(report.violations.len()))
            }
        }
    }
}

fn parse_residue_selector(text: &str, rank: usize) -> Result<Vec<usize>, CliError> {
    let mut types = Vec::new();
    for token in text.split([',', ' ']).filter(|t| !t.is_empty()) {
        let t: usize = token
            .parse()
            .map_err(|_| CliError::Parse(format!("--residue: not a type index: {token:?}")))?;
        if t >= rank {
            return Err(CliError::Parse(format!(
                "--residue: type {t} is out of range for rank {rank}"
            )));
        }
        if types.contains(&t) {
            return Err(CliError::Parse(format!("--residue: type {t} given twice")));
        }
        types.push(t);
    }
    types.sort_unstable();
    Ok(types)
}

fn render_check(full: &FullRun, timing: bool) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "mode: {}   degree: {}   group order: {}\n",
        full.mode.as_str(),
        full.built.group().degree(),
        full.built.group().order(),
    ));
    out.push_str(&format!(
        "rank: {}   parabolic orders: {:?}\n",
        full.rank(),
        full.parabolic_orders,
    ));
    out.push_str(&format!(
        "element counts: {:?}   chambers: {}   connected: {}\n",
        full.element_counts, full.chamber_count, full.connected,
    ));
    out.push_str(&format!(
        "geometry: {}   action chamber orbits: {}\n",
        full.is_geometry, full.action_chamber_orbit_count,
    ));
    let opt = |v: Option<bool>| v.map_or("n/a".to_string(), |b| b.to_string());
    out.push_str(&format!(
        "intersection condition: {}   independent: {}   union generation: {}\n",
        opt(full.intersection_condition),
        opt(full.independent),
        full.generation.holds,
    ));
    if let Some(a) = full.analysis.as_ref() {
        out.push_str(&format!(
            "thin: {}   firm: {}   residually connected: {}\n",
            a.thinness.thin, a.thinness.firm, a.rc.residually_connected,
        ));
        out.push_str(&format!(
            "aut order: {}   aut chamber orbits: {}   classification: {}\n",
            a.aut.order(),
            a.classification.orbit_count,
            a.classification.kind.as_str(),
        ));
    }
    if let Some((size, cycle)) = full.type0_base_residue {
        out.push_str(&format!(
            "type-0 base residue: {size} elements, single cycle: {cycle}\n"
        ));
    }
    out.push_str(&format!("verdict: {}\n", full.verdict.as_str()));
    if timing {
        out.push_str(&format!(
            "timing: build {} ms, analysis {} ms\n",
            full.build_ms, full.analysis_ms,
        ));
    }
    out
}
