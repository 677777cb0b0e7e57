//! The full analysis pipeline: realize the group, derive parabolics per
//! mode, build the coset incidence system, and run every check the report
//! needs. All results are deterministic for a given input.

use std::sync::Arc;
use std::time::Instant;

use hypertope::coset::{BuiltGeometry, CPlusSpec, CosetGeometrySpec};
use hypertope::criteria::{
    extension_transitivity, involution_intersection_condition, parabolic_union_generation,
    twist_intersection_condition, ExtensionTransitivityReport, GenerationReport, IcStrategy,
    IcViolation,
};
use hypertope::group::{GroupRealization, SubgroupHandle, DEFAULT_ELEMENT_CAP};
use hypertope::incidence::{Flag, RcOptions, RcReport, ThinnessReport, DEFAULT_FLAG_BUDGET};
use hypertope::symmetry::{
    audit_chiral_thinness, automorphisms, classify_chambers, flag_orbits, AutGroup, AutOptions,
    ChamberClassification, HypertopeVerdict, PermutationOrbitReducer,
};
use hypertope::Permutation;

use crate::input::{InputSpec, Mode};
use crate::report::{
    ClassificationSection, CriteriaSection, ExtensionRow, GenerationWitness, GeometrySection,
    GroupSection, InputSection, IntersectionWitness, ParabolicSection, ResidueSummary, RunReport,
    TimingSection, VerdictSection, WitnessSection,
};
use crate::CliError;

/// Action and product-set audits run only below this group order; they are
/// quadratic in it.
pub const ACTION_AUDIT_MAX_ORDER: usize = 600;

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Element cap for group closure.
    pub cap: usize,
    pub aut: AutOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ELEMENT_CAP,
            aut: AutOptions::default(),
        }
    }
}

/// Applies cap precedence: command line, then input file, then the
/// `HYPERTOPE_CAP` environment variable, then the built-in default.
pub fn resolve_cap(cli_cap: Option<usize>, file_cap: Option<usize>) -> Result<usize, CliError> {
    if let Some(cap) = cli_cap.or(file_cap) {
        return Ok(cap);
    }
    match std::env::var("HYPERTOPE_CAP") {
        Ok(text) => text
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Parse(format!("HYPERTOPE_CAP: not a valid integer: {text:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_ELEMENT_CAP),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(CliError::Parse("HYPERTOPE_CAP: not valid unicode".to_string()))
        }
    }
}

/// Everything computed by one pipeline run.
pub struct FullRun {
    pub mode: Mode,
    pub cap: usize,
    pub built: BuiltGeometry,
    pub cplus: Option<CPlusSpec>,
    pub parabolic_orders: Vec<usize>,
    pub element_counts: Vec<usize>,
    pub connected: bool,
    pub chamber_count: usize,
    pub action_chamber_orbit_count: usize,
    pub is_geometry: bool,
    pub geometry_witness: Option<Flag>,
    pub intersection_condition: Option<bool>,
    pub non_involutions: Option<Vec<usize>>,
    pub independent: Option<bool>,
    pub ic_violation: Option<IcViolation>,
    pub generation: GenerationReport,
    pub extension: Option<Vec<ExtensionTransitivityReport>>,
    pub action_type_preserving: Option<bool>,
    pub action_rank_le_2_transitive: Option<bool>,
    /// Present exactly when the system is a geometry.
    pub analysis: Option<GeometryAnalysis>,
    pub verdict: HypertopeVerdict,
    pub type0_base_residue: Option<(usize, bool)>,
    pub build_ms: u128,
    pub analysis_ms: u128,
}

pub struct GeometryAnalysis {
    pub thinness: ThinnessReport,
    pub rc: RcReport,
    pub aut: AutGroup,
    pub classification: ChamberClassification,
}

pub fn run(spec: &InputSpec, opts: &PipelineOptions) -> Result<FullRun, CliError> {
    let start = Instant::now();
    let budget = DEFAULT_FLAG_BUDGET;

    let (cspec, cplus) = match spec.mode {
        Mode::Cgroup => {
            let group = GroupRealization::generate(spec.degree, &spec.generators, opts.cap)?;
            let gen_idx = group.generator_indices().to_vec();
            let parabolics: Vec<SubgroupHandle> = (0..gen_idx.len())
                .map(|skip| {
                    let kept: Vec<u32> = gen_idx
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != skip)
                        .map(|(_, &g)| g)
                        .collect();
                    SubgroupHandle::generated(&group, &kept)
                })
                .collect();
            (CosetGeometrySpec::new(group, parabolics)?, None)
        }
        Mode::Cplus => {
            let cp = CPlusSpec::new(spec.degree, &spec.generators, opts.cap)?;
            (cp.geometry_spec()?, Some(cp))
        }
        Mode::Explicit => {
            let ambient: Vec<Permutation> = if spec.generators.is_empty() {
                spec.subgroups.iter().flatten().cloned().collect()
            } else {
                spec.generators.clone()
            };
            let group = GroupRealization::generate(spec.degree, &ambient, opts.cap)?;
            let parabolics: Vec<SubgroupHandle> = spec
                .subgroups
                .iter()
                .map(|gens| SubgroupHandle::from_permutations(&group, gens))
                .collect::<Result<_, _>>()?;
            (CosetGeometrySpec::new(group, parabolics)?, None)
        }
    };
    let built = cspec.build()?;
    let build_ms = start.elapsed().as_millis();
    let analysis_start = Instant::now();
    let group = Arc::clone(built.group());
    let system = built.system();

    let (intersection_condition, non_involutions, independent, ic_violation) =
        match (&spec.mode, &cplus) {
            (Mode::Cgroup, _) => {
                let rep = involution_intersection_condition(
                    &group,
                    group.generator_indices(),
                    IcStrategy::Exhaustive,
                );
                (
                    Some(rep.intersection_condition.holds),
                    Some(rep.non_involutions),
                    None,
                    rep.intersection_condition.violation,
                )
            }
            (Mode::Cplus, Some(cp)) => {
                let rep = twist_intersection_condition(cp, IcStrategy::Exhaustive)?;
                (
                    Some(rep.intersection_condition.holds),
                    None,
                    Some(rep.independent),
                    rep.intersection_condition.violation,
                )
            }
            _ => (None, None, None, None),
        };
    let generation = parabolic_union_generation(built.spec())?;

    let element_counts = system.element_counts();
    let connected = system.is_connected();
    let chambers = system.chambers(budget)?;
    let chamber_count = chambers.len();
    let (_, action_orbits) = flag_orbits(&chambers, &built.action_generators());

    let (extension, action_type_preserving, action_rank_le_2_transitive) =
        if group.order() <= ACTION_AUDIT_MAX_ORDER {
            let mut rows = Vec::with_capacity(system.rank());
            for t in 0..system.rank() {
                let j: Vec<usize> = (0..system.rank()).filter(|&x| x != t).collect();
                rows.push(extension_transitivity(&built, &j, budget)?);
            }
            (Some(rows), Some(action_preserves_types(&built)), Some(rank_le_2_transitive(&built, budget)?))
        } else {
            (None, None, None)
        };

    let check = system.geometry_check(budget)?.clone();
    let (analysis, verdict) = if check.is_geometry {
        let thinness = system.thinness(budget)?;
        let reducer = PermutationOrbitReducer::new(built.action_generators());
        let rc = system.residual_connectivity(&RcOptions {
            flag_budget: budget,
            reducer: Some(&reducer),
        })?;
        let aut = automorphisms(system, &opts.aut)?;
        let complex = system.chamber_complex(budget)?;
        let classification = classify_chambers(&complex, &aut.permutations);
        audit_chiral_thinness(classification.kind, &thinness)?;
        let verdict = HypertopeVerdict::from_properties(
            true,
            thinness.thin,
            rc.residually_connected,
            Some(classification.kind),
        );
        (
            Some(GeometryAnalysis {
                thinness,
                rc,
                aut,
                classification,
            }),
            verdict,
        )
    } else {
        (None, HypertopeVerdict::NotAGeometry)
    };

    let type0_base_residue = if spec.mode == Mode::Cplus && system.rank() == 3 && check.is_geometry
    {
        let base = built.element_containing(0, 0);
        let residue = system.residue(&Flag::from_elements(vec![base]))?;
        let size = residue.system.size();
        let single_cycle = size > 0
            && (0..size as u32).all(|e| residue.system.neighbors(e).len() == 2)
            && residue.system.is_connected();
        Some((size, single_cycle))
    } else {
        None
    };

    Ok(FullRun {
        mode: spec.mode,
        cap: opts.cap,
        parabolic_orders: built.spec().parabolic_orders(),
        cplus,
        element_counts,
        connected,
        chamber_count,
        action_chamber_orbit_count: action_orbits,
        is_geometry: check.is_geometry,
        geometry_witness: check.witness,
        intersection_condition,
        non_involutions,
        independent,
        ic_violation,
        generation,
        extension,
        action_type_preserving,
        action_rank_le_2_transitive,
        analysis,
        verdict,
        type0_base_residue,
        build_ms,
        analysis_ms: analysis_start.elapsed().as_millis(),
        built,
    })
}

/// Every right-multiplication image keeps every element's type.
fn action_preserves_types(built: &BuiltGeometry) -> bool {
    let system = built.system();
    (0..built.group().order() as u32).all(|g| {
        let perm = built.action_permutation(g);
        (0..system.size() as u32).all(|e| system.type_of(perm.apply(e)) == system.type_of(e))
    })
}

/// The action is transitive on every flag set of at most two types.
fn rank_le_2_transitive(built: &BuiltGeometry, budget: usize) -> Result<bool, CliError> {
    let rank = built.system().rank();
    let generators = built.action_generators();
    for a in 0..rank {
        for b in a..rank {
            let types: Vec<usize> = if a == b { vec![a] } else { vec![a, b] };
            let flags = built
                .system()
                .flags_of_types(hypertope::TypeSet::from_types(&types), budget)?;
            if flag_orbits(&flags, &generators).1 > 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

impl FullRun {
    pub fn rank(&self) -> usize {
        self.built.system().rank()
    }

    /// The flat key/value view compared against stored fixture snapshots.
    pub fn snapshot(&self) -> serde_json::Value {
        let a = self.analysis.as_ref();
        serde_json::json!({
            "mode": self.mode.as_str(),
            "rank": self.rank(),
            "group_degree": self.built.group().degree(),
            "group_order": self.built.group().order(),
            "parabolic_orders": self.parabolic_orders,
            "element_counts": self.element_counts,
            "is_geometry": self.is_geometry,
            "connected": self.connected,
            "chamber_count": self.chamber_count,
            "action_chamber_orbit_count": self.action_chamber_orbit_count,
            "intersection_condition": self.intersection_condition,
            "independent": self.independent,
            "parabolic_union_generation": self.generation.holds,
            "thin": a.map(|a| a.thinness.thin),
            "firm": a.map(|a| a.thinness.firm),
            "residually_connected": a.map(|a| a.rc.residually_connected),
            "aut_order": a.map(|a| a.aut.order()),
            "aut_chamber_orbit_count": a.map(|a| a.classification.orbit_count),
            "classification": a.map(|a| a.classification.kind.as_str()),
            "hypertope_verdict": self.verdict.as_str(),
            "type0_base_residue": self.type0_base_residue.map(|(size, is_single_cycle)| {
                serde_json::json!({"size": size, "is_single_cycle": is_single_cycle})
            }),
        })
    }

    pub fn report(&self, input: &InputSpec, with_timing: bool) -> RunReport {
        let system = self.built.system();
        let a = self.analysis.as_ref();
        RunReport {
            input: InputSection {
                degree: input.degree,
                mode: self.mode.as_str(),
                generators: input.raw_generators.clone(),
                subgroups: input.raw_subgroups.clone(),
                cap: self.cap,
            },
            group: GroupSection {
                degree: self.built.group().degree(),
                order: self.built.group().order(),
            },
            parabolics: ParabolicSection {
                rank: self.rank(),
                orders: self.parabolic_orders.clone(),
            },
            criteria: CriteriaSection {
                intersection_condition: self.intersection_condition,
                non_involutions: self.non_involutions.clone(),
                independent: self.independent,
                parabolic_union_generation: self.generation.holds,
                extension_transitivity: self.extension.as_ref().map(|rows| {
                    rows.iter()
                        .map(|r| ExtensionRow {
                            j_types: r.j_types.clone(),
                            transitive_on_j: r.transitive_on_j,
                            extensions_transitive: r.extensions_transitive,
                            products_hold: r.products_hold,
                            surjective: r.surjective,
                        })
                        .collect()
                }),
            },
            geometry: GeometrySection {
                is_geometry: self.is_geometry,
                connected: self.connected,
                element_counts: self.element_counts.clone(),
                chamber_count: self.chamber_count,
                action_chamber_orbit_count: self.action_chamber_orbit_count,
                thin: a.map(|a| a.thinness.thin),
                firm: a.map(|a| a.thinness.firm),
                residually_connected: a.map(|a| a.rc.residually_connected),
                type0_base_residue: self.type0_base_residue.map(|(size, is_single_cycle)| {
                    ResidueSummary {
                        size,
                        is_single_cycle,
                    }
                }),
            },
            classification: a.map(|a| ClassificationSection {
                aut_order: a.aut.order(),
                aut_chamber_orbit_count: a.classification.orbit_count,
                classification: a.classification.kind.as_str(),
            }),
            verdicts: VerdictSection {
                hypertope_verdict: self.verdict.as_str(),
                action_type_preserving: self.action_type_preserving,
                action_rank_le_2_transitive: self.action_rank_le_2_transitive,
            },
            witnesses: WitnessSection {
                non_geometry_flag: self.geometry_witness.as_ref().map(|f| system.flag_labels(f)),
                disconnected_residue_flag: a
                    .and_then(|a| a.rc.witness.as_ref())
                    .map(|f| system.flag_labels(f)),
                panel_not_thin: a
                    .and_then(|a| a.thinness.thin_witness.as_ref())
                    .map(|f| system.flag_labels(f)),
                panel_not_firm: a
                    .and_then(|a| a.thinness.firm_witness.as_ref())
                    .map(|f| system.flag_labels(f)),
                intersection_violation: self.ic_violation.as_ref().map(|v| IntersectionWitness {
                    left: v.left.clone(),
                    right: v.right.clone(),
                    expected_order: v.expected_order,
                    actual_order: v.actual_order,
                }),
                generation_violation: self.generation.violation.as_ref().map(|v| {
                    GenerationWitness {
                        types: v.types.clone(),
                        intersection_order: v.intersection_order,
                        generated_order: v.generated_order,
                    }
                }),
            },
            timing: with_timing.then(|| TimingSection {
                build_ms: self.build_ms,
                analysis_ms: self.analysis_ms,
                total_ms: self.build_ms + self.analysis_ms,
            }),
        }
    }
}
