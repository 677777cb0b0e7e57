//! Serializable run reports. Field order is fixed (input, group, parabolics,
//! criteria, geometry, classification, verdicts, witnesses, timing) so
//! downstream consumers can rely on byte-stable output.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub input: InputSection,
    pub group: GroupSection,
    pub parabolics: ParabolicSection,
    pub criteria: CriteriaSection,
    pub geometry: GeometrySection,
    pub classification: Option<ClassificationSection>,
    pub verdicts: VerdictSection,
    pub witnesses: WitnessSection,
    pub timing: Option<TimingSection>,
}

#[derive(Debug, Serialize)]
pub struct InputSection {
    pub degree: usize,
    pub mode: &'static str,
    pub generators: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgroups: Option<Value>,
    /// The element cap actually applied after flag/file/environment
    /// precedence.
    pub cap: usize,
}

#[derive(Debug, Serialize)]
pub struct GroupSection {
    pub degree: usize,
    pub order: usize,
}

#[derive(Debug, Serialize)]
pub struct ParabolicSection {
    pub rank: usize,
    pub orders: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct CriteriaSection {
    /// Subset intersection condition; `null` in explicit mode.
    pub intersection_condition: Option<bool>,
    /// Generator positions that are not involutions (cgroup mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_involutions: Option<Vec<usize>>,
    /// Whether each distinguished generator avoids the subgroup generated
    /// by the others; `null` outside cplus mode.
    pub independent: Option<bool>,
    pub parabolic_union_generation: bool,
    /// Per corank-1 type subset: both transitivity-extension routes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension_transitivity: Option<Vec<ExtensionRow>>,
}

#[derive(Debug, Serialize)]
pub struct ExtensionRow {
    pub j_types: Vec<usize>,
    pub transitive_on_j: bool,
    pub extensions_transitive: bool,
    pub products_hold: bool,
    pub surjective: bool,
}

#[derive(Debug, Serialize)]
pub struct GeometrySection {
    pub is_geometry: bool,
    pub connected: bool,
    pub element_counts: Vec<usize>,
    pub chamber_count: usize,
    pub action_chamber_orbit_count: usize,
    pub thin: Option<bool>,
    pub firm: Option<bool>,
    pub residually_connected: Option<bool>,
    pub type0_base_residue: Option<ResidueSummary>,
}

#[derive(Debug, Serialize)]
pub struct ResidueSummary {
    pub size: usize,
    pub is_single_cycle: bool,
}

#[derive(Debug, Serialize)]
pub struct ClassificationSection {
    pub aut_order: usize,
    pub aut_chamber_orbit_count: usize,
    pub classification: &'static str,
}

#[derive(Debug, Serialize)]
pub struct VerdictSection {
    pub hypertope_verdict: &'static str,
    /// Right-multiplication action checks; omitted above the audit size
    /// gate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action_type_preserving: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action_rank_le_2_transitive: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct WitnessSection {
    /// Labels of a maximal flag that is not a chamber.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_geometry_flag: Option<Vec<String>>,
    /// Labels of a flag whose residue is disconnected.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disconnected_residue_flag: Option<Vec<String>>,
    /// Labels of a corank-1 flag whose residue size differs from two.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panel_not_thin: Option<Vec<String>>,
    /// Labels of a corank-1 flag with fewer than two extensions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub panel_not_firm: Option<Vec<String>>,
    /// Subset pair breaking the intersection condition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersection_violation: Option<IntersectionWitness>,
    /// Type subset breaking the union-generation identity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generation_violation: Option<GenerationWitness>,
}

#[derive(Debug, Serialize)]
pub struct IntersectionWitness {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub expected_order: usize,
    pub actual_order: usize,
}

#[derive(Debug, Serialize)]
pub struct GenerationWitness {
    pub types: Vec<usize>,
    pub intersection_order: usize,
    pub generated_order: usize,
}

#[derive(Debug, Serialize)]
pub struct TimingSection {
    pub build_ms: u128,
    pub analysis_ms: u128,
    pub total_ms: u128,
}
