//! Group-theoretic criteria on parabolic subgroup lattices: intersection
//! conditions, the union-generation identity that certifies residual
//! connectivity under chamber transitivity, and product-set conditions for
//! transitivity on extended flags.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coset::{BuiltGeometry, CPlusSpec, CosetError, CosetGeometrySpec};
use crate::group::{GroupRealization, SubgroupHandle};
use crate::incidence::{intersect_sorted, IncidenceError, TypeSet};
use crate::symmetry::action_transitive_on_types;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CriteriaError {
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error(transparent)]
    Incidence(#[from] IncidenceError),
    #[error("type index {0} is out of range")]
    TypeOutOfRange(usize),
    #[error("type index {0} appears twice")]
    DuplicateType(usize),
    #[error("independent routes disagree: {context}")]
    InternalDisagreement { context: String },
}

/// How many subset pairs an intersection-condition check examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcStrategy {
    /// Every unordered pair of qualifying subsets.
    Exhaustive,
    /// A seeded random sample; deterministic for a fixed seed.
    Sampled { pairs: usize, seed: u64 },
}

/// A pair of subsets whose subgroup intersection is not the subgroup of the
/// subset intersection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcViolation {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub expected_order: usize,
    pub actual_order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcReport {
    pub holds: bool,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub violation: Option<IcViolation>,
}

/// Outcome of [`involution_intersection_condition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionIcReport {
    /// Generator positions whose element is not an involution.
    pub non_involutions: Vec<usize>,
    pub intersection_condition: IcReport,
    pub holds: bool,
}

/// For a family of involution generators indexed by position: every
/// generator must have order two, and for all position subsets `J`, `K`
/// the subgroup generated by `J` must meet the one generated by `K`
/// exactly in the one generated by `J ∩ K`.
pub fn involution_intersection_condition(
    group: &Arc<GroupRealization>,
    generator_indices: &[u32],
    strategy: IcStrategy,
) -> InvolutionIcReport {
    let r = generator_indices.len();
    let non_involutions: Vec<usize> = generator_indices
        .iter()
        .enumerate()
        .filter(|&(_, &g)| group.element(g).order() != 2)
        .map(|(k, _)| k)
        .collect();
    let table: Vec<Vec<u32>> = (0u32..(1 << r))
        .map(|mask| {
            let gens: Vec<u32> = (0..r)
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| generator_indices[k])
                .collect();
            group.close_indices(&gens)
        })
        .collect();
    let ic = check_intersection_condition(&table, r, 0, strategy);
    InvolutionIcReport {
        holds: non_involutions.is_empty() && ic.holds,
        non_involutions,
        intersection_condition: ic,
    }
}

/// Outcome of [`twist_intersection_condition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistIcReport {
    pub intersection_condition: IcReport,
    pub independent: bool,
    /// Positions (1-based within the distinguished generator list) of
    /// generators lying inside the subgroup generated by the others.
    pub dependent_generators: Vec<usize>,
    pub holds: bool,
}

/// For twist-generated parabolics: for all type subsets `J`, `K` with at
/// least two types each, the parabolic of `J` must meet the parabolic of
/// `K` exactly in the parabolic of `J ∩ K`. Also records whether each
/// distinguished generator lies outside the subgroup generated by the
/// others (the intersection condition forces this).
pub fn twist_intersection_condition(
    spec: &CPlusSpec,
    strategy: IcStrategy,
) -> Result<TwistIcReport, CriteriaError> {
    let r = spec.rank();
    let group = spec.group();
    let mut table: Vec<Vec<u32>> = Vec::with_capacity(1 << r);
    for mask in 0u32..(1 << r) {
        let types: Vec<usize> = (0..r).filter(|&t| mask >> t & 1 == 1).collect();
        table.push(spec.parabolic(&types)?.member_indices().to_vec());
    }
    let ic = check_intersection_condition(&table, r, 2, strategy);
    let mut dependent = Vec::new();
    for i in 1..r {
        let others: Vec<u32> = (1..r).filter(|&j| j != i).map(|j| spec.alpha(j)).collect();
        let generated = SubgroupHandle::generated(group, &others);
        if generated.contains_index(spec.alpha(i)) {
            dependent.push(i);
        }
    }
    Ok(TwistIcReport {
        holds: ic.holds && dependent.is_empty(),
        intersection_condition: ic,
        independent: dependent.is_empty(),
        dependent_generators: dependent,
    })
}

fn check_intersection_condition(
    table: &[Vec<u32>],
    r: usize,
    min_size: u32,
    strategy: IcStrategy,
) -> IcReport {
    let qualifies = |mask: u32| mask.count_ones() >= min_size;
    let mut pairs_checked = 0usize;
    let mut violation = None;
    let mut exhaustive = true;
    {
        let mut test_pair = |a: u32, b: u32| -> Option<IcViolation> {
            pairs_checked += 1;
            let actual = intersect_sorted(&table[a as usize], &table[b as usize]);
            let expected = &table[(a & b) as usize];
            if &actual == expected {
                None
            } else {
                Some(IcViolation {
                    left: mask_types(a, r),
                    right: mask_types(b, r),
                    expected_order: expected.len(),
                    actual_order: actual.len(),
                })
            }
        };
        match strategy {
            IcStrategy::Exhaustive => {
                'outer: for a in 0u32..(1 << r) {
                    if !qualifies(a) {
                        continue;
                    }
                    for b in a..(1 << r) {
                        if !qualifies(b) {
                            continue;
                        }
                        if let Some(v) = test_pair(a, b) {
                            violation = Some(v);
                            break 'outer;
                        }
                    }
                }
            }
            IcStrategy::Sampled { pairs, seed } => {
                exhaustive = false;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut attempts = 0usize;
                let mut done = 0usize;
                while done < pairs && attempts < pairs.saturating_mul(100) + 100 {
                    attempts += 1;
                    let a = rng.gen_range(0u32..(1 << r));
                    let b = rng.gen_range(0u32..(1 << r));
                    if !qualifies(a) || !qualifies(b) {
                        continue;
                    }
                    done += 1;
                    if let Some(v) = test_pair(a, b) {
                        violation = Some(v);
                        break;
                    }
                }
            }
        }
    }
    IcReport {
        holds: violation.is_none(),
        pairs_checked,
        exhaustive,
        violation,
    }
}

fn mask_types(mask: u32, r: usize) -> Vec<usize> {
    (0..r).filter(|&t| mask >> t & 1 == 1).collect()
}

/// A type subset where the intersection of its parabolics is not generated
/// by the union of the one-type-larger parabolic intersections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationViolation {
    pub types: Vec<usize>,
    pub intersection_order: usize,
    pub generated_order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationReport {
    pub holds: bool,
    pub subsets_checked: usize,
    pub violation: Option<GenerationViolation>,
}

/// For every type subset `J` missing at least two types, checks that the
/// intersection of the parabolics over `J` equals the subgroup generated
/// by the union of the intersections over all `J ∪ {i}` with `i ∉ J`.
///
/// When the ambient group acts transitively on the chambers of a geometry,
/// this identity over all such `J` is equivalent to residual connectivity;
/// without that transitivity it carries no such meaning.
pub fn parabolic_union_generation(
    spec: &CosetGeometrySpec,
) -> Result<GenerationReport, CriteriaError> {
    let r = spec.rank();
    let group = spec.group();
    let members: Vec<&[u32]> = spec.parabolics().iter().map(|p| p.member_indices()).collect();
    let table = intersection_table(group, &members);
    let mut subsets_checked = 0usize;
    for mask in 0u32..(1 << r) {
        let corank = r - mask.count_ones() as usize;
        if corank < 2 {
            continue;
        }
        subsets_checked += 1;
        let mut union_gens: Vec<u32> = Vec::new();
        for i in 0..r {
            if mask >> i & 1 == 0 {
                union_gens.extend_from_slice(&table[(mask | (1 << i)) as usize]);
            }
        }
        union_gens.sort_unstable();
        union_gens.dedup();
        let generated = group.close_indices(&union_gens);
        if generated != table[mask as usize] {
            return Ok(GenerationReport {
                holds: false,
                subsets_checked,
                violation: Some(GenerationViolation {
                    types: mask_types(mask, r),
                    intersection_order: table[mask as usize].len(),
                    generated_order: generated.len(),
                }),
            });
        }
    }
    Ok(GenerationReport {
        holds: true,
        subsets_checked,
        violation: None,
    })
}

/// Intersection of the listed member sets per subset bitmask; the empty
/// subset gives the whole group.
fn intersection_table(group: &Arc<GroupRealization>, members: &[&[u32]]) -> Vec<Vec<u32>> {
    let r = members.len();
    let mut table: Vec<Vec<u32>> = vec![Vec::new(); 1 << r];
    table[0] = (0..group.order() as u32).collect();
    for mask in 1u32..(1 << r) {
        let j = mask.trailing_zeros() as usize;
        let rest = (mask & !(1 << j)) as usize;
        table[mask as usize] = intersect_sorted(&table[rest], members[j]);
    }
    table
}

/// Sorted indices of all products `a ∘ b` over two member lists.
pub fn product_of_members(group: &Arc<GroupRealization>, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut hit = vec![false; group.order()];
    for &x in a {
        for &y in b {
            hit[group.compose_indices(x, y) as usize] = true;
        }
    }
    hit.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i as u32))
        .collect()
}

/// Order of the two factors in each product of the condition below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductOrder {
    /// Products `G_j ∘ G_i` against `G_J ∘ G_i`.
    JThenI,
    /// Products `G_i ∘ G_j` against `G_i ∘ G_J`.
    IThenJ,
}

/// The set identity `⋂_{j∈J} (G_j ∘ G_i) = G_J ∘ G_i` (or its mirror
/// image), where `G_J` is the intersection of the parabolics over `J`.
/// The two orders are equivalent because inverting every element swaps
/// them. The empty `J` makes both sides the whole group.
pub fn product_condition(
    spec: &CosetGeometrySpec,
    j_types: &[usize],
    i: usize,
    order: ProductOrder,
) -> Result<bool, CriteriaError> {
    let r = spec.rank();
    validate_types(j_types, i, r)?;
    let group = spec.group();
    let members: Vec<&[u32]> = spec.parabolics().iter().map(|p| p.member_indices()).collect();
    let g_i = members[i];
    let whole: Vec<u32> = (0..group.order() as u32).collect();
    let mut lhs: Option<Vec<u32>> = None;
    let mut g_j: Vec<u32> = whole.clone();
    for &j in j_types {
        let factor = match order {
            ProductOrder::JThenI => product_of_members(group, members[j], g_i),
            ProductOrder::IThenJ => product_of_members(group, g_i, members[j]),
        };
        lhs = Some(match lhs {
            None => factor,
            Some(acc) => intersect_sorted(&acc, &factor),
        });
        g_j = intersect_sorted(&g_j, members[j]);
    }
    let lhs = lhs.unwrap_or(whole);
    let rhs = match order {
        ProductOrder::JThenI => product_of_members(group, &g_j, g_i),
        ProductOrder::IThenJ => product_of_members(group, g_i, &g_j),
    };
    Ok(lhs == rhs)
}

fn validate_types(j_types: &[usize], i: usize, rank: usize) -> Result<(), CriteriaError> {
    if i >= rank {
        return Err(CriteriaError::TypeOutOfRange(i));
    }
    let mut seen = vec![false; rank];
    for &t in j_types {
        if t >= rank {
            return Err(CriteriaError::TypeOutOfRange(t));
        }
        if seen[t] {
            return Err(CriteriaError::DuplicateType(t));
        }
        seen[t] = true;
    }
    if seen[i] {
        return Err(CriteriaError::DuplicateType(i));
    }
    Ok(())
}

/// Whether extending transitivity from `J`-flags to `(J ∪ {i})`-flags
/// succeeds for every `i ∉ J`, decided twice: once by orbit counting on
/// actual flags, once by the product-set identity. The two routes must
/// agree; a mismatch is reported as an internal error rather than a result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionTransitivityReport {
    pub j_types: Vec<usize>,
    pub transitive_on_j: bool,
    /// Orbit route: transitive on `(J ∪ {i})`-flags for every `i ∉ J`.
    pub extensions_transitive: bool,
    /// Product route: the product identity holds for every `i ∉ J`.
    pub products_hold: bool,
    /// Transitive on `J`-flags and on every one-type extension.
    pub surjective: bool,
}

pub fn extension_transitivity(
    built: &BuiltGeometry,
    j_types: &[usize],
    budget: usize,
) -> Result<ExtensionTransitivityReport, CriteriaError> {
    let rank = built.system().rank();
    let j_set = TypeSet::from_types(j_types);
    if j_types.len() != j_set.len() {
        for (k, &t) in j_types.iter().enumerate() {
            if j_types[..k].contains(&t) {
                return Err(CriteriaError::DuplicateType(t));
            }
        }
    }
    for &t in j_types {
        if t >= rank {
            return Err(CriteriaError::TypeOutOfRange(t));
        }
    }
    let transitive_on_j = action_transitive_on_types(built, j_set, budget)?;
    let mut extensions_transitive = true;
    let mut products_hold = true;
    for i in 0..rank {
        if j_set.contains(i) {
            continue;
        }
        extensions_transitive &=
            action_transitive_on_types(built, j_set.with(i), budget)?;
        products_hold &= product_condition(built.spec(), j_types, i, ProductOrder::JThenI)?;
    }
    let orbit_route = transitive_on_j && extensions_transitive;
    let product_route = transitive_on_j && products_hold;
    if orbit_route != product_route {
        return Err(CriteriaError::InternalDisagreement {
            context: format!(
                "extension transitivity over J={j_types:?}: orbit route says {orbit_route}, \
                 product route says {product_route}"
            ),
        });
    }
    Ok(ExtensionTransitivityReport {
        j_types: j_types.to_vec(),
        transitive_on_j,
        extensions_transitive,
        products_hold,
        surjective: orbit_route,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ELEMENT_CAP;
    use crate::perm::Permutation;

    fn perms(degree: usize, lits: &[&str]) -> Vec<Permutation> {
        lits.iter()
            .map(|s| Permutation::parse(degree, s).unwrap())
            .collect()
    }

    fn adjacent_transposition_group() -> (Arc<GroupRealization>, Vec<u32>) {
        let gens = perms(4, &["(0 1)", "(1 2)", "(2 3)"]);
        let group = GroupRealization::generate(4, &gens, DEFAULT_ELEMENT_CAP).unwrap();
        let indices = group.generator_indices().to_vec();
        (group, indices)
    }

    fn omitted_generator_spec(
        group: &Arc<GroupRealization>,
        gen_indices: &[u32],
    ) -> CosetGeometrySpec {
        let parabolics: Vec<SubgroupHandle> = (0..gen_indices.len())
            .map(|skip| {
                let kept: Vec<u32> = gen_indices
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &g)| g)
                    .collect();
                SubgroupHandle::generated(group, &kept)
            })
            .collect();
        CosetGeometrySpec::new(Arc::clone(group), parabolics).unwrap()
    }

    #[test]
    fn adjacent_transpositions_satisfy_the_intersection_condition() {
        let (group, indices) = adjacent_transposition_group();
        let report = involution_intersection_condition(&group, &indices, IcStrategy::Exhaustive);
        assert!(report.holds);
        assert!(report.non_involutions.is_empty());
        assert!(report.intersection_condition.exhaustive);
        assert_eq!(report.intersection_condition.pairs_checked, 8 * 9 / 2);
    }

    #[test]
    fn redundant_involution_breaks_the_intersection_condition() {
        // The third involution is the product of the first two commuting
        // ones, so a two-generator subgroup already contains it.
        let gens = perms(4, &["(0 1)", "(2 3)", "(0 1)(2 3)"]);
        let group = GroupRealization::generate(4, &gens, DEFAULT_ELEMENT_CAP).unwrap();
        let indices = group.generator_indices().to_vec();
        let report = involution_intersection_condition(&group, &indices, IcStrategy::Exhaustive);
        assert!(!report.holds);
        let v = report.intersection_condition.violation.unwrap();
        assert!(v.actual_order > v.expected_order);
    }

    #[test]
    fn non_involutions_are_reported_by_position() {
        let gens = perms(4, &["(0 1)", "(1 2 3)"]);
        let group = GroupRealization::generate(4, &gens, DEFAULT_ELEMENT_CAP).unwrap();
        let indices = group.generator_indices().to_vec();
        let report = involution_intersection_condition(&group, &indices, IcStrategy::Exhaustive);
        assert_eq!(report.non_involutions, vec![1]);
        assert!(!report.holds);
    }

    #[test]
    fn twist_condition_holds_for_a_three_cycle_pair() {
        let spec = CPlusSpec::new(4, &perms(4, &["(0 1 2)", "(1 2 3)"]), DEFAULT_ELEMENT_CAP)
            .unwrap();
        let report = twist_intersection_condition(&spec, IcStrategy::Exhaustive).unwrap();
        assert!(report.holds && report.independent);
        assert!(report.intersection_condition.holds);
    }

    #[test]
    fn identity_generator_is_caught_as_dependent_and_ic_fails() {
        let spec = CPlusSpec::new(3, &perms(3, &["(0 1 2)", "()"]), DEFAULT_ELEMENT_CAP).unwrap();
        let report = twist_intersection_condition(&spec, IcStrategy::Exhaustive).unwrap();
        assert!(!report.holds);
        assert!(!report.independent);
        assert_eq!(report.dependent_generators, vec![2]);
        assert!(!report.intersection_condition.holds);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let (group, indices) = adjacent_transposition_group();
        let strategy = IcStrategy::Sampled { pairs: 20, seed: 7 };
        let a = involution_intersection_condition(&group, &indices, strategy);
        let b = involution_intersection_condition(&group, &indices, strategy);
        assert_eq!(a, b);
        assert!(!a.intersection_condition.exhaustive);
        assert_eq!(a.intersection_condition.pairs_checked, 20);
        assert!(a.holds);
    }

    #[test]
    fn union_generation_identity_holds_for_the_transposition_spec() {
        let (group, indices) = adjacent_transposition_group();
        let spec = omitted_generator_spec(&group, &indices);
        let report = parabolic_union_generation(&spec).unwrap();
        assert!(report.holds);
        // Subsets missing at least two of three types: the empty set and
        // the three singletons.
        assert_eq!(report.subsets_checked, 4);
    }

    #[test]
    fn union_generation_identity_fails_without_chamber_transitive_structure() {
        // The rank-one parabolics of this rotation pair intersect pairwise
        // in the identity, so no singleton subgroup is generated by the
        // union of its extensions.
        let spec = CPlusSpec::new(4, &perms(4, &["(0 1 2)", "(1 3 2)"]), DEFAULT_ELEMENT_CAP)
            .unwrap();
        let geometry = spec.geometry_spec().unwrap();
        let report = parabolic_union_generation(&geometry).unwrap();
        assert!(!report.holds);
        let v = report.violation.unwrap();
        assert_eq!(v.types, vec![0]);
        assert_eq!(v.intersection_order, 2);
        assert_eq!(v.generated_order, 1);
    }

    #[test]
    fn product_condition_orders_agree() {
        let (group, indices) = adjacent_transposition_group();
        let spec = omitted_generator_spec(&group, &indices);
        for j_types in [vec![], vec![0], vec![1], vec![0, 1], vec![1, 2]] {
            for i in 0..3 {
                if j_types.contains(&i) {
                    continue;
                }
                let a = product_condition(&spec, &j_types, i, ProductOrder::JThenI).unwrap();
                let b = product_condition(&spec, &j_types, i, ProductOrder::IThenJ).unwrap();
                assert_eq!(a, b, "J={j_types:?}, i={i}");
            }
        }
    }

    #[test]
    fn extension_transitivity_routes_agree_on_coset_systems() {
        let (group, indices) = adjacent_transposition_group();
        let built = omitted_generator_spec(&group, &indices).build().unwrap();
        for j_types in [vec![], vec![0], vec![2], vec![0, 2]] {
            let report = extension_transitivity(&built, &j_types, 100_000).unwrap();
            assert!(report.surjective, "J={j_types:?}");
        }

        let cplus =
            CPlusSpec::new(4, &perms(4, &["(0 1 2)", "(1 3 2)"]), DEFAULT_ELEMENT_CAP).unwrap();
        let built = cplus.geometry_spec().unwrap().build().unwrap();
        for j_types in [vec![], vec![0], vec![1], vec![0, 1], vec![1, 2]] {
            let report = extension_transitivity(&built, &j_types, 100_000).unwrap();
            assert!(report.transitive_on_j);
            assert_eq!(report.extensions_transitive, report.products_hold);
        }
    }

    #[test]
    fn invalid_type_arguments_are_rejected() {
        let (group, indices) = adjacent_transposition_group();
        let spec = omitted_generator_spec(&group, &indices);
        assert!(matches!(
            product_condition(&spec, &[0, 0], 1, ProductOrder::JThenI),
            Err(CriteriaError::DuplicateType(0))
        ));
        assert!(matches!(
            product_condition(&spec, &[0], 5, ProductOrder::JThenI),
            Err(CriteriaError::TypeOutOfRange(5))
        ));
        assert!(matches!(
            product_condition(&spec, &[1], 1, ProductOrder::JThenI),
            Err(CriteriaError::DuplicateType(1))
        ));
    }
}
