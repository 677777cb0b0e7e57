//! The main-theorem suite: every chiral geometry arising from a verified
//! twist construction must be residually connected, and every rank-3 twist
//! geometry must be residually connected and firm. Checked over the fixture
//! catalog and, optionally, a generator-tuple search.

use std::path::Path;

use serde::Serialize;

use hypertope::symmetry::ChamberClass;

use crate::catalog::{fixture_paths, run_fixture_file};
use crate::input::Mode;
use crate::search::{search, SearchConfig, SearchSummary};
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct CatalogPhase {
    pub fixtures_run: usize,
    /// Twist-mode fixtures whose intersection condition and independence
    /// both hold.
    pub verified_twist_specs: usize,
    pub chiral_hits: usize,
    pub chiral_rc_confirmed: usize,
    pub rank3_twist_geometries: usize,
    pub rank3_rc_firm_confirmed: usize,
}

#[derive(Debug, Serialize)]
pub struct TheoremReport {
    pub catalog: CatalogPhase,
    pub search: Option<SearchSummary>,
    pub violations: Vec<String>,
    pub ok: bool,
}

pub fn verify_main_theorem(
    dir: &Path,
    search_config: Option<SearchConfig>,
    cli_cap: Option<usize>,
) -> Result<TheoremReport, CliError> {
    let mut violations = Vec::new();
    let mut catalog = CatalogPhase {
        fixtures_run: 0,
        verified_twist_specs: 0,
        chiral_hits: 0,
        chiral_rc_confirmed: 0,
        rank3_twist_geometries: 0,
        rank3_rc_firm_confirmed: 0,
    };

    for path in fixture_paths(dir)? {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let full = run_fixture_file(&path, cli_cap)?;
        catalog.fixtures_run += 1;
        if full.mode != Mode::Cplus {
            continue;
        }
        let verified = full.intersection_condition == Some(true) && full.independent == Some(true);
        if !verified {
            continue;
        }
        catalog.verified_twist_specs += 1;
        let Some(analysis) = full.analysis.as_ref() else {
            continue;
        };
        let rc = analysis.rc.residually_connected;
        if analysis.classification.kind == ChamberClass::Chiral {
            catalog.chiral_hits += 1;
            if rc {
                catalog.chiral_rc_confirmed += 1;
            } else {
                violations.push(format!(
                    "THEOREM-VIOLATION: fixture {name} classifies chiral but is not residually connected"
                ));
            }
        }
        if full.rank() == 3 {
            catalog.rank3_twist_geometries += 1;
            if rc && analysis.thinness.firm {
                catalog.rank3_rc_firm_confirmed += 1;
            } else {
                violations.push(format!(
                    "rank-3 violation: fixture {name} has rc={rc}, firm={}",
                    analysis.thinness.firm
                ));
            }
        }
    }

    let search_summary = match search_config {
        Some(config) => {
            let summary = search(&config)?;
            violations.extend(summary.violations.iter().cloned());
            Some(summary)
        }
        None => None,
    };

    let ok = violations.is_empty();
    Ok(TheoremReport {
        catalog,
        search: search_summary,
        violations,
        ok,
    })
}

impl TheoremReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let c = &self.catalog;
        out.push_str(&format!(
            "catalog: {} fixtures, {} verified twist specs, {} chiral ({} rc-confirmed), {} rank-3 twist geometries ({} rc+firm)\n",
            c.fixtures_run,
            c.verified_twist_specs,
            c.chiral_hits,
            c.chiral_rc_confirmed,
            c.rank3_twist_geometries,
            c.rank3_rc_firm_confirmed,
        ));
        if let Some(s) = &self.search {
            out.push_str(&format!("search: groups {}\n", s.groups_searched.join(", ")));
            out.push_str(&format!(
                "search: {} specs tried, {} passed the intersection condition, {} geometries ({} of rank 3), {} chiral hits, {} theorem confirmations\n",
                s.specs_tried,
                s.icplus_passes,
                s.geometries_built,
                s.rank3_geometries,
                s.chiral_hits.len(),
                s.theorem_confirmations,
            ));
            for hit in &s.chiral_hits {
                out.push_str(&format!(
                    "search: chiral hit in {} from ({}), rank {}, rc={}\n",
                    hit.group,
                    hit.generators.join(", "),
                    hit.rank,
                    hit.residually_connected,
                ));
            }
        }
        for v in &self.violations {
            out.push_str(v);
            out.push('\n');
        }
        out.push_str(&format!(
            "result: {} ({} violations)\n",
            if self.ok { "OK" } else { "THEOREM-VIOLATION" },
            self.violations.len(),
        ));
        out
    }
}
