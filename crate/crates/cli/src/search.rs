//! Generator-tuple search over a fixed list of small permutation groups:
//! enumerate generating pairs (and triples in the smallest groups), keep the
//! tuples passing the twist intersection condition, build their coset
//! systems, and classify the resulting geometries.

use serde::Serialize;

use hypertope::coset::CPlusSpec;
use hypertope::criteria::{twist_intersection_condition, IcStrategy};
use hypertope::group::{GroupRealization, DEFAULT_ELEMENT_CAP};
use hypertope::incidence::{RcOptions, DEFAULT_FLAG_BUDGET};
use hypertope::symmetry::{
    automorphisms, classify_chambers, AutOptions, ChamberClass, PermutationOrbitReducer,
};
use hypertope::Permutation;

use crate::CliError;

pub struct BuiltinGroup {
    pub name: &'static str,
    pub degree: usize,
    pub generators: &'static [&'static str],
}

/// Small groups searched by `verify-main-theorem --search`, ordered by
/// (order, name). Generator triples are only enumerated in groups up to
/// [`TRIPLE_MAX_ORDER`].
pub const BUILTIN_GROUPS: &[BuiltinGroup] = &[
    BuiltinGroup { name: "q8", degree: 8, generators: &["(0 1 2 3)(4 7 6 5)", "(0 4 2 6)(1 5 3 7)"] },
    BuiltinGroup { name: "c3xc3", degree: 6, generators: &["(0 1 2)", "(3 4 5)"] },
    BuiltinGroup { name: "d5", degree: 5, generators: &["(0 1 2 3 4)", "(1 4)(2 3)"] },
    BuiltinGroup { name: "a4", degree: 4, generators: &["(0 1 2)", "(0 1)(2 3)"] },
    BuiltinGroup { name: "d6", degree: 6, generators: &["(0 1 2 3 4 5)", "(1 5)(2 4)"] },
    BuiltinGroup { name: "f20", degree: 5, generators: &["(0 1 2 3 4)", "(1 2 4 3)"] },
    BuiltinGroup { name: "c7_c3", degree: 7, generators: &["(0 1 2 3 4 5 6)", "(1 2 4)(3 6 5)"] },
    BuiltinGroup { name: "s4", degree: 4, generators: &["(0 1 2 3)", "(0 1)"] },
    BuiltinGroup { name: "s3xs3", degree: 6, generators: &["(0 1 2)", "(0 1)", "(3 4 5)", "(3 4)"] },
    BuiltinGroup { name: "a5", degree: 5, generators: &["(0 1 2 3 4)", "(0 1 2)"] },
];

pub const TRIPLE_MAX_ORDER: usize = 24;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub max_order: usize,
}

#[derive(Debug, Serialize)]
pub struct ChiralHit {
    pub group: String,
    pub generators: Vec<String>,
    pub rank: usize,
    pub residually_connected: bool,
}

#[derive(Debug, Serialize)]
pub struct SearchSummary {
    pub groups_searched: Vec<String>,
    /// Generating tuples of distinct nontrivial elements, canonical under
    /// simultaneous conjugation.
    pub specs_tried: usize,
    pub icplus_passes: usize,
    pub geometries_built: usize,
    pub rank3_geometries: usize,
    pub chiral_hits: Vec<ChiralHit>,
    /// Must equal the number of chiral hits when the suite passes.
    pub theorem_confirmations: usize,
    pub violations: Vec<String>,
}

pub fn search(config: &SearchConfig) -> Result<SearchSummary, CliError> {
    let mut summary = SearchSummary {
        groups_searched: Vec::new(),
        specs_tried: 0,
        icplus_passes: 0,
        geometries_built: 0,
        rank3_geometries: 0,
        chiral_hits: Vec::new(),
        theorem_confirmations: 0,
        violations: Vec::new(),
    };
    for builtin in BUILTIN_GROUPS {
        let generators: Vec<Permutation> = builtin
            .generators
            .iter()
            .map(|lit| Permutation::parse(builtin.degree, lit))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Internal(format!("builtin group {}: {e}", builtin.name)))?;
        let group = GroupRealization::generate(builtin.degree, &generators, DEFAULT_ELEMENT_CAP)?;
        if group.order() > config.max_order {
            continue;
        }
        summary.groups_searched.push(builtin.name.to_string());
        search_group(builtin, &group, &mut summary)?;
    }
    Ok(summary)
}

fn search_group(
    builtin: &BuiltinGroup,
    group: &std::sync::Arc<GroupRealization>,
    summary: &mut SearchSummary,
) -> Result<(), CliError> {
    let order = group.order();
    let nontrivial: Vec<u32> = (1..order as u32).collect();
    let mut tuples: Vec<Vec<u32>> = Vec::new();
    for &a in &nontrivial {
        for &b in &nontrivial {
            if b != a {
                tuples.push(vec![a, b]);
            }
        }
    }
    if order <= TRIPLE_MAX_ORDER {
        for &a in &nontrivial {
            for &b in &nontrivial {
                if b == a {
                    continue;
                }
                for &c in &nontrivial {
                    if c != a && c != b {
                        tuples.push(vec![a, b, c]);
                    }
                }
            }
        }
    }
    for tuple in tuples {
        if !is_conjugation_canonical(group, &tuple) {
            continue;
        }
        if group.close_indices(&tuple).len() != order {
            continue;
        }
        summary.specs_tried += 1;
        examine_tuple(builtin, group, &tuple, summary)?;
    }
    Ok(())
}

/// Keeps one ordered tuple per orbit of simultaneous conjugation: the
/// lexicographically least index vector over all conjugators.
fn is_conjugation_canonical(group: &GroupRealization, tuple: &[u32]) -> bool {
    let mut image = vec![0u32; tuple.len()];
    for g in 0..group.order() as u32 {
        let g_inv = group.inverse_index(g);
        for (slot, &x) in image.iter_mut().zip(tuple) {
            *slot = group.compose_indices(group.compose_indices(g_inv, x), g);
        }
        if image.as_slice() < tuple {
            return false;
        }
    }
    true
}

fn examine_tuple(
    builtin: &BuiltinGroup,
    group: &std::sync::Arc<GroupRealization>,
    tuple: &[u32],
    summary: &mut SearchSummary,
) -> Result<(), CliError> {
    let budget = DEFAULT_FLAG_BUDGET;
    let perms: Vec<Permutation> = tuple.iter().map(|&i| group.element(i).clone()).collect();
    let spec = CPlusSpec::new(builtin.degree, &perms, DEFAULT_ELEMENT_CAP)?;
    let ic = twist_intersection_condition(&spec, IcStrategy::Exhaustive)?;
    if !ic.holds {
        return Ok(());
    }
    summary.icplus_passes += 1;

    let built = spec.geometry_spec()?.build()?;
    let system = built.system();
    if !system.geometry_check(budget)?.is_geometry {
        return Ok(());
    }
    summary.geometries_built += 1;

    let describe = || {
        format!(
            "{} tuple ({})",
            builtin.name,
            perms
                .iter()
                .map(|p| p.cycle_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    };
    let reducer = PermutationOrbitReducer::new(built.action_generators());
    let rc = system
        .residual_connectivity(&RcOptions {
            flag_budget: budget,
            reducer: Some(&reducer),
        })?
        .residually_connected;
    if system.rank() == 3 {
        summary.rank3_geometries += 1;
        let thinness = system.thinness(budget)?;
        if !(rc && thinness.firm) {
            summary.violations.push(format!(
                "rank-3 violation: {} is a verified twist geometry with rc={rc}, firm={}",
                describe(),
                thinness.firm,
            ));
        }
    }

    let aut = automorphisms(system, &AutOptions::default())?;
    let complex = system.chamber_complex(budget)?;
    let classification = classify_chambers(&complex, &aut.permutations);
    if classification.kind == ChamberClass::Chiral {
        summary.chiral_hits.push(ChiralHit {
            group: builtin.name.to_string(),
            generators: perms.iter().map(|p| p.cycle_string()).collect(),
            rank: system.rank(),
            residually_connected: rc,
        });
        if rc {
            summary.theorem_confirmations += 1;
        } else {
            summary.violations.push(format!(
                "THEOREM-VIOLATION: {} classifies chiral but is not residually connected",
                describe(),
            ));
        }
    }
    Ok(())
}
