//! Symmetries of incidence systems: type-preserving automorphism search,
//! orbit machinery for flags and chambers, and the chamber-orbit
//! classification that separates flag-transitive from chiral systems.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::coset::BuiltGeometry;
use crate::incidence::{
    ChamberComplex, Flag, FlagOrbitReducer, IncidenceError, IncidenceSystem, ThinnessReport,
    TypeSet,
};
use crate::perm::Permutation;

/// Default ceiling on system size for the automorphism search.
pub const DEFAULT_AUT_ELEMENT_CAP: usize = 5_000;

/// Default ceiling on search-tree nodes visited while looking for
/// automorphisms.
pub const DEFAULT_AUT_VISIT_CAP: usize = 2_000_000;

/// Systems at most this large use the brute-force route by default.
const BRUTE_FORCE_SIZE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("system has {size} elements, above the automorphism cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("automorphism search exceeded its node budget of {cap}")]
    SearchBudgetExceeded { cap: usize },
    #[error("internally inconsistent results: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Incidence(#[from] IncidenceError),
}

#[derive(Debug, Clone, Copy)]
pub struct AutOptions {
    pub element_cap: usize,
    pub visit_cap: usize,
}

impl Default for AutOptions {
    fn default() -> Self {
        Self {
            element_cap: DEFAULT_AUT_ELEMENT_CAP,
            visit_cap: DEFAULT_AUT_VISIT_CAP,
        }
    }
}

/// Which route produced an automorphism group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutRoute {
    BruteForce,
    Refinement,
}

/// The full group of type-preserving incidence-graph automorphisms,
/// as sorted permutations of the element ids.
#[derive(Debug, Clone)]
pub struct AutGroup {
    pub permutations: Vec<Permutation>,
    pub route: AutRoute,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.permutations.len()
    }
}

/// True when `candidate` fixes every type and maps the incidence relation
/// onto itself.
pub fn is_automorphism(system: &IncidenceSystem, candidate: &Permutation) -> bool {
    let n = system.size();
    if candidate.degree() != n {
        return false;
    }
    for v in 0..n as u32 {
        let image = candidate.apply(v);
        if system.type_of(v) != system.type_of(image) {
            return false;
        }
        let mut mapped: Vec<u32> = system
            .neighbors(v)
            .iter()
            .map(|&u| candidate.apply(u))
            .collect();
        mapped.sort_unstable();
        if mapped != system.neighbors(image) {
            return false;
        }
    }
    true
}

/// Finds every type-preserving automorphism by trying all type-block
/// bijections. Only sensible for very small systems; used as the reference
/// route in cross-checks.
pub fn automorphisms_brute_force(
    system: &IncidenceSystem,
    opts: &AutOptions,
) -> Result<AutGroup, SymmetryError> {
    let n = system.size();
    if n > opts.element_cap {
        return Err(SymmetryError::TooLarge {
            size: n,
            cap: opts.element_cap,
        });
    }
    let blocks: Vec<Vec<u32>> = (0..system.rank()).map(|t| system.elements_of_type(t)).collect();
    let mut found = BTreeSet::new();
    let mut images: Vec<u32> = vec![0; n];
    brute_rec(system, &blocks, 0, &mut images, &mut found);
    Ok(AutGroup {
        permutations: found.into_iter().collect(),
        route: AutRoute::BruteForce,
    })
}

fn brute_rec(
    system: &IncidenceSystem,
    blocks: &[Vec<u32>],
    t: usize,
    images: &mut Vec<u32>,
    found: &mut BTreeSet<Permutation>,
) {
    if t == blocks.len() {
        if let Ok(p) = Permutation::from_images(images.clone()) {
            if is_automorphism(system, &p) {
                found.insert(p);
            }
        }
        return;
    }
    let block = &blocks[t];
    let mut targets = block.clone();
    permute_rec(system, blocks, t, block, &mut targets, 0, images, found);
}

#[allow(clippy::too_many_arguments)]
fn permute_rec(
    system: &IncidenceSystem,
    blocks: &[Vec<u32>],
    t: usize,
    block: &[u32],
    targets: &mut Vec<u32>,
    k: usize,
    images: &mut Vec<u32>,
    found: &mut BTreeSet<Permutation>,
) {
    if k == block.len() {
        brute_rec(system, blocks, t + 1, images, found);
        return;
    }
    for pick in k..targets.len() {
        targets.swap(k, pick);
        images[block[k] as usize] = targets[k];
        permute_rec(system, blocks, t, block, targets, k + 1, images, found);
        targets.swap(k, pick);
    }
}

/// One round of equitable refinement towards a stable coloring: vertices are
/// recolored by (current color, sorted multiset of neighbor colors) until
/// the number of color classes stops growing. The relabeling depends only on
/// the signatures, never on vertex ids, so it commutes with isomorphisms.
fn equitable_refine(system: &IncidenceSystem, colors: &mut [u32]) -> Vec<(u32, u32)> {
    loop {
        let old_count = colors.iter().collect::<BTreeSet<_>>().len();
        let signatures: Vec<(u32, Vec<u32>)> = (0..system.size() as u32)
            .map(|v| {
                let mut nb: Vec<u32> = system
                    .neighbors(v)
                    .iter()
                    .map(|&u| colors[u as usize])
                    .collect();
                nb.sort_unstable();
                (colors[v as usize], nb)
            })
            .collect();
        let relabel: BTreeMap<&(u32, Vec<u32>), u32> = signatures
            .iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .zip(0u32..)
            .collect();
        if relabel.len() == old_count {
            let mut summary: BTreeMap<u32, u32> = BTreeMap::new();
            for &c in colors.iter() {
                *summary.entry(c).or_insert(0) += 1;
            }
            return summary.into_iter().collect();
        }
        for (v, sig) in signatures.iter().enumerate() {
            colors[v] = relabel[sig];
        }
    }
}

struct AutSearch<'a> {
    system: &'a IncidenceSystem,
    base_traces: Vec<Vec<(u32, u32)>>,
    base_leaf: Option<Vec<u32>>,
    found: BTreeSet<Permutation>,
    visits: usize,
    visit_cap: usize,
}

impl AutSearch<'_> {
    fn run(&mut self, mut colors: Vec<u32>, depth: usize) -> Result<(), SymmetryError> {
        self.visits += 1;
        if self.visits > self.visit_cap {
            return Err(SymmetryError::SearchBudgetExceeded {
                cap: self.visit_cap,
            });
        }
        let summary = equitable_refine(self.system, &mut colors);
        if depth < self.base_traces.len() {
            if self.base_traces[depth] != summary {
                return Ok(());
            }
        } else if self.base_leaf.is_none() {
            self.base_traces.push(summary);
        } else {
            return Ok(());
        }

        let target = summary_first_nonsingleton(&self.base_traces[depth]);
        let Some(target_color) = target else {
            // Discrete coloring: sort vertices by color to get a labeling.
            let mut labeling: Vec<u32> = (0..self.system.size() as u32).collect();
            labeling.sort_by_key(|&v| colors[v as usize]);
            match &self.base_leaf {
                None => {
                    self.base_leaf = Some(labeling);
                    self.found
                        .insert(Permutation::identity(self.system.size().max(1)).unwrap());
                }
                Some(base) => {
                    let mut images = vec![0u32; self.system.size()];
                    for (k, &v) in base.iter().enumerate() {
                        images[v as usize] = labeling[k];
                    }
                    if let Ok(p) = Permutation::from_images(images) {
                        if is_automorphism(self.system, &p) {
                            self.found.insert(p);
                        }
                    }
                }
            }
            return Ok(());
        };

        let cell: Vec<u32> = (0..self.system.size() as u32)
            .filter(|&v| colors[v as usize] == target_color)
            .collect();
        let fresh = colors.iter().max().copied().unwrap_or(0) + 1;
        for v in cell {
            let mut child = colors.clone();
            child[v as usize] = fresh;
            self.run(child, depth + 1)?;
        }
        Ok(())
    }
}

fn summary_first_nonsingleton(summary: &[(u32, u32)]) -> Option<u32> {
    summary.iter().find(|&&(_, size)| size >= 2).map(|&(c, _)| c)
}

/// Finds every type-preserving automorphism by individualization and
/// refinement: walk a search tree of refined colorings, read a candidate
/// off each discrete leaf against the first leaf, and keep the ones that
/// verify. Every automorphism corresponds to exactly one surviving leaf.
pub fn automorphisms_refinement(
    system: &IncidenceSystem,
    opts: &AutOptions,
) -> Result<AutGroup, SymmetryError> {
    let n = system.size();
    if n > opts.element_cap {
        return Err(SymmetryError::TooLarge {
            size: n,
            cap: opts.element_cap,
        });
    }
    if n == 0 {
        return Ok(AutGroup {
            permutations: vec![],
            route: AutRoute::Refinement,
        });
    }
    let colors: Vec<u32> = (0..n as u32).map(|v| system.type_of(v) as u32).collect();
    let mut search = AutSearch {
        system,
        base_traces: Vec::new(),
        base_leaf: None,
        found: BTreeSet::new(),
        visits: 0,
        visit_cap: opts.visit_cap,
    };
    search.run(colors, 0)?;
    Ok(AutGroup {
        permutations: search.found.into_iter().collect(),
        route: AutRoute::Refinement,
    })
}

/// Dispatcher: brute force for tiny systems, refinement search otherwise.
pub fn automorphisms(
    system: &IncidenceSystem,
    opts: &AutOptions,
) -> Result<AutGroup, SymmetryError> {
    if system.size() <= BRUTE_FORCE_SIZE {
        automorphisms_brute_force(system, opts)
    } else {
        automorphisms_refinement(system, opts)
    }
}

/// Orbit id per flag under the group generated by `generators`, with ids
/// assigned in first-appearance order, plus the orbit count.
pub fn flag_orbits(flags: &[Flag], generators: &[Permutation]) -> (Vec<u32>, usize) {
    let index: HashMap<&Flag, usize> = flags.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut orbit = vec![u32::MAX; flags.len()];
    let mut count = 0usize;
    for start in 0..flags.len() {
        if orbit[start] != u32::MAX {
            continue;
        }
        let id = count as u32;
        count += 1;
        orbit[start] = id;
        let mut queue = vec![start];
        while let Some(i) = queue.pop() {
            for g in generators {
                let image = Flag::from_elements(
                    flags[i].elements().iter().map(|&e| g.apply(e)).collect(),
                );
                if let Some(&j) = index.get(&image) {
                    if orbit[j] == u32::MAX {
                        orbit[j] = id;
                        queue.push(j);
                    }
                }
            }
        }
    }
    (orbit, count)
}

/// Keeps one representative per orbit, in first-appearance order.
pub struct PermutationOrbitReducer {
    generators: Vec<Permutation>,
}

impl PermutationOrbitReducer {
    pub fn new(generators: Vec<Permutation>) -> Self {
        Self { generators }
    }
}

impl FlagOrbitReducer for PermutationOrbitReducer {
    fn reduce(&self, _system: &IncidenceSystem, flags: Vec<Flag>) -> Vec<Flag> {
        let (orbit, count) = flag_orbits(&flags, &self.generators);
        let mut reps: Vec<Option<Flag>> = vec![None; count];
        for (i, flag) in flags.into_iter().enumerate() {
            let slot = &mut reps[orbit[i] as usize];
            if slot.is_none() {
                *slot = Some(flag);
            }
        }
        reps.into_iter().flatten().collect()
    }
}

/// Whether right multiplication is transitive on the flags of exactly the
/// given types; vacuously true when no such flags exist.
pub fn action_transitive_on_types(
    built: &BuiltGeometry,
    types: TypeSet,
    budget: usize,
) -> Result<bool, IncidenceError> {
    let flags = built.system().flags_of_types(types, budget)?;
    if flags.len() <= 1 {
        return Ok(true);
    }
    let (_, count) = flag_orbits(&flags, &built.action_generators());
    Ok(count == 1)
}

/// Transitivity of the right-multiplication action on flags of every type
/// subset at once.
#[derive(Debug, Clone)]
pub struct TransitivityAudit {
    /// One entry per subset of types, in ascending bitmask order.
    pub per_subset: Vec<(TypeSet, bool)>,
    /// Transitive on all flags with at most two types. This must hold for
    /// every coset system; a failure indicates a construction bug.
    pub rank_le_2_transitive: bool,
    /// Transitive on all proper subsets of the full type set.
    pub proper_subsets_transitive: bool,
    pub chamber_transitive: bool,
}

pub fn action_transitivity_audit(
    built: &BuiltGeometry,
    budget: usize,
) -> Result<TransitivityAudit, IncidenceError> {
    let rank = built.system().rank();
    let mut per_subset = Vec::new();
    let mut rank_le_2 = true;
    let mut proper = true;
    let mut chamber = true;
    for types in TypeSet::all_subsets(rank) {
        let transitive = action_transitive_on_types(built, types, budget)?;
        if types.len() <= 2 {
            rank_le_2 &= transitive;
        }
        if types.len() < rank {
            proper &= transitive;
        } else {
            chamber = transitive;
        }
        per_subset.push((types, transitive));
    }
    Ok(TransitivityAudit {
        per_subset,
        rank_le_2_transitive: rank_le_2,
        proper_subsets_transitive: proper,
        chamber_transitive: chamber,
    })
}

/// How a group of permutations partitions the chambers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChamberClass {
    /// One chamber orbit.
    FlagTransitive,
    /// Two orbits and every pair of adjacent chambers straddles them.
    Chiral,
    Neither,
}

impl ChamberClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChamberClass::FlagTransitive => "flag_transitive",
            ChamberClass::Chiral => "chiral",
            ChamberClass::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChamberClassification {
    pub orbit_count: usize,
    pub kind: ChamberClass,
    /// Adjacent chambers in the same orbit; rules out chirality when the
    /// orbit count is two.
    pub same_orbit_adjacent: Option<(u32, u32)>,
}

/// Classifies a chamber complex under the given permutations (either the
/// full automorphism group or the right-multiplication action).
pub fn classify_chambers(
    complex: &ChamberComplex,
    permutations: &[Permutation],
) -> ChamberClassification {
    let (orbit, count) = flag_orbits(&complex.chambers, permutations);
    if count == 1 {
        return ChamberClassification {
            orbit_count: 1,
            kind: ChamberClass::FlagTransitive,
            same_orbit_adjacent: None,
        };
    }
    let mut same_orbit_adjacent = None;
    'outer: for (c, per_type) in complex.adjacency.iter().enumerate() {
        for others in per_type {
            for &o in others {
                if orbit[c] == orbit[o as usize] {
                    same_orbit_adjacent = Some((c as u32, o));
                    break 'outer;
                }
            }
        }
    }
    let kind = if count == 2 && same_orbit_adjacent.is_none() {
        ChamberClass::Chiral
    } else {
        ChamberClass::Neither
    };
    ChamberClassification {
        orbit_count: count,
        kind,
        same_orbit_adjacent,
    }
}

/// Number of chamber orbits under right multiplication.
pub fn action_chamber_orbit_count(
    built: &BuiltGeometry,
    budget: usize,
) -> Result<usize, IncidenceError> {
    let chambers = built.system().chambers(budget)?;
    let (_, count) = flag_orbits(&chambers, &built.action_generators());
    Ok(count)
}

/// Guards against a structurally impossible combination: two straddling
/// chamber orbits force every panel through two same-orbit chambers to
/// have size at most two, so a firm system classified chiral must be thin.
pub fn audit_chiral_thinness(
    kind: ChamberClass,
    thinness: &ThinnessReport,
) -> Result<(), SymmetryError> {
    if kind == ChamberClass::Chiral && thinness.firm && !thinness.thin {
        return Err(SymmetryError::InternalInconsistency(
            "chamber orbits classify as chiral, yet a firm panel has more than two chambers"
                .to_string(),
        ));
    }
    Ok(())
}

/// Final verdict for a built system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypertopeVerdict {
    NotAGeometry,
    NotAHypertope,
    Hypertope,
    RegularHypertope,
    ChiralHypertope,
}

impl HypertopeVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            HypertopeVerdict::NotAGeometry => "not_a_geometry",
            HypertopeVerdict::NotAHypertope => "not_a_hypertope",
            HypertopeVerdict::Hypertope => "hypertope",
            HypertopeVerdict::RegularHypertope => "regular_hypertope",
            HypertopeVerdict::ChiralHypertope => "chiral_hypertope",
        }
    }

    /// A hypertope is a thin, residually connected geometry; it is regular
    /// when flag-transitive and chiral when its chamber orbits are chiral.
    pub fn from_properties(
        is_geometry: bool,
        thin: bool,
        residually_connected: bool,
        kind: Option<ChamberClass>,
    ) -> Self {
        if !is_geometry {
            return HypertopeVerdict::NotAGeometry;
        }
        if !(thin && residually_connected) {
            return HypertopeVerdict::NotAHypertope;
        }
        match kind {
            Some(ChamberClass::FlagTransitive) => HypertopeVerdict::RegularHypertope,
            Some(ChamberClass::Chiral) => HypertopeVerdict::ChiralHypertope,
            _ => HypertopeVerdict::Hypertope,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::IncidenceSystem;

    fn four_cycle() -> IncidenceSystem {
        IncidenceSystem::new(2, vec![0, 0, 1, 1], &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    /// Path on five vertices with alternating types 0,1,0,1,0.
    fn five_path() -> IncidenceSystem {
        IncidenceSystem::new(
            2,
            vec![0, 1, 0, 1, 0],
            &[(0, 1), (1, 2), (2, 3), (3, 4)],
        )
        .unwrap()
    }

    #[test]
    fn both_routes_agree_on_small_systems() {
        let opts = AutOptions::default();
        for system in [
            four_cycle(),
            five_path(),
            IncidenceSystem::new(3, vec![0, 1, 2], &[(0, 1), (0, 2), (1, 2)]).unwrap(),
            IncidenceSystem::new(2, vec![0, 1, 0, 1], &[(0, 1), (2, 3)]).unwrap(),
        ] {
            let brute = automorphisms_brute_force(&system, &opts).unwrap();
            let refined = automorphisms_refinement(&system, &opts).unwrap();
            assert_eq!(brute.permutations, refined.permutations);
            for p in &brute.permutations {
                assert!(is_automorphism(&system, p));
            }
        }
    }

    #[test]
    fn four_cycle_has_the_full_type_preserving_symmetry() {
        let aut = automorphisms(&four_cycle(), &AutOptions::default()).unwrap();
        assert_eq!(aut.order(), 4);
        assert_eq!(aut.route, AutRoute::BruteForce);
        let refined =
            automorphisms_refinement(&four_cycle(), &AutOptions::default()).unwrap();
        assert_eq!(refined.order(), 4);
    }

    #[test]
    fn path_reversal_is_the_only_nontrivial_automorphism() {
        let aut = automorphisms(&five_path(), &AutOptions::default()).unwrap();
        assert_eq!(aut.order(), 2);
        let reversal = &aut.permutations[1];
        assert_eq!(reversal.images(), &[4, 3, 2, 1, 0]);
    }

    #[test]
    fn five_path_chambers_classify_as_neither() {
        let system = five_path();
        let complex = system.chamber_complex(1000).unwrap();
        let aut = automorphisms(&system, &AutOptions::default()).unwrap();
        let classification = classify_chambers(&complex, &aut.permutations);
        assert_eq!(classification.orbit_count, 2);
        assert_eq!(classification.kind, ChamberClass::Neither);
        assert!(classification.same_orbit_adjacent.is_some());
    }

    #[test]
    fn four_cycle_is_flag_transitive_under_its_automorphisms() {
        let system = four_cycle();
        let complex = system.chamber_complex(1000).unwrap();
        let aut = automorphisms(&system, &AutOptions::default()).unwrap();
        let classification = classify_chambers(&complex, &aut.permutations);
        assert_eq!(classification.kind, ChamberClass::FlagTransitive);
        assert_eq!(classification.orbit_count, 1);
    }

    #[test]
    fn orbit_reducer_keeps_one_flag_per_orbit() {
        let system = four_cycle();
        let flags = system.flags_of_types(TypeSet::singleton(0), 100).unwrap();
        let aut = automorphisms(&system, &AutOptions::default()).unwrap();
        let reducer = PermutationOrbitReducer::new(aut.permutations.clone());
        let reduced = reducer.reduce(&system, flags.clone());
        assert_eq!(reduced.len(), 1);
        let identity_only = PermutationOrbitReducer::new(vec![]);
        assert_eq!(identity_only.reduce(&system, flags).len(), 2);
    }

    #[test]
    fn element_cap_is_enforced() {
        let system = four_cycle();
        let opts = AutOptions {
            element_cap: 2,
            visit_cap: 1000,
        };
        assert!(matches!(
            automorphisms_refinement(&system, &opts),
            Err(SymmetryError::TooLarge { size: 4, cap: 2 })
        ));
    }

    #[test]
    fn verdict_combinations() {
        use HypertopeVerdict as V;
        assert_eq!(V::from_properties(false, true, true, None), V::NotAGeometry);
        assert_eq!(
            V::from_properties(true, false, true, Some(ChamberClass::FlagTransitive)),
            V::NotAHypertope
        );
        assert_eq!(
            V::from_properties(true, true, true, Some(ChamberClass::FlagTransitive)),
            V::RegularHypertope
        );
        assert_eq!(
            V::from_properties(true, true, true, Some(ChamberClass::Chiral)),
            V::ChiralHypertope
        );
        assert_eq!(
            V::from_properties(true, true, true, Some(ChamberClass::Neither)),
            V::Hypertope
        );
    }

    #[test]
    fn chiral_thinness_audit_fires_only_on_the_impossible_combination() {
        let thin_firm = ThinnessReport {
            thin: true,
            firm: true,
            min_panel: Some(2),
            max_panel: Some(2),
            thin_witness: None,
            firm_witness: None,
        };
        assert!(audit_chiral_thinness(ChamberClass::Chiral, &thin_firm).is_ok());
        let firm_not_thin = ThinnessReport {
            thin: false,
            firm: true,
            min_panel: Some(2),
            max_panel: Some(3),
            thin_witness: None,
            firm_witness: None,
        };
        assert!(audit_chiral_thinness(ChamberClass::Chiral, &firm_not_thin).is_err());
        assert!(audit_chiral_thinness(ChamberClass::FlagTransitive, &firm_not_thin).is_ok());
    }
}
