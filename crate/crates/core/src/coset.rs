//! Building incidence systems whose elements are right cosets of a family
//! of subgroups, with two cosets incident exactly when they intersect.

use std::sync::Arc;

use thiserror::Error;

use crate::group::{GroupError, GroupRealization, SubgroupHandle};
use crate::incidence::{Flag, IncidenceError, IncidenceSystem};
use crate::perm::Permutation;

/// Product sets of subgroup pairs are cached while the pairwise work stays
/// below this bound; larger pairs fall back to scanning per membership test.
const PRODUCT_CACHE_LIMIT: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CosetError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Incidence(#[from] IncidenceError),
    #[error("a coset geometry needs at least one subgroup")]
    NoSubgroups,
    #[error("at least one generator is required")]
    NeedGenerators,
    #[error("subgroup {0} does not live in the ambient group")]
    ForeignSubgroup(usize),
    #[error("type label count {found} does not match subgroup count {expected}")]
    TypeLabelCount { found: usize, expected: usize },
    #[error("type index {0} is out of range")]
    TypeIndexOutOfRange(usize),
    #[error("neither candidate coset yields a chamber adjacent at type {j} for the pair ({i}, {j})")]
    NoAdjacentChamber { i: usize, j: usize },
}

/// Ambient group plus one subgroup per type; `build` turns it into the
/// incidence system of right cosets.
#[derive(Debug, Clone)]
pub struct CosetGeometrySpec {
    group: Arc<GroupRealization>,
    parabolics: Vec<SubgroupHandle>,
    type_labels: Vec<String>,
}

impl CosetGeometrySpec {
    pub fn new(
        group: Arc<GroupRealization>,
        parabolics: Vec<SubgroupHandle>,
    ) -> Result<Self, CosetError> {
        let labels = (0..parabolics.len()).map(|t| t.to_string()).collect();
        Self::with_type_labels(group, parabolics, labels)
    }

    pub fn with_type_labels(
        group: Arc<GroupRealization>,
        parabolics: Vec<SubgroupHandle>,
        type_labels: Vec<String>,
    ) -> Result<Self, CosetError> {
        if parabolics.is_empty() {
            return Err(CosetError::NoSubgroups);
        }
        if type_labels.len() != parabolics.len() {
            return Err(CosetError::TypeLabelCount {
                found: type_labels.len(),
                expected: parabolics.len(),
            });
        }
        let whole = SubgroupHandle::whole(&group);
        for (i, p) in parabolics.iter().enumerate() {
            if !p.same_parent(&whole) {
                return Err(CosetError::ForeignSubgroup(i));
            }
        }
        Ok(Self {
            group,
            parabolics,
            type_labels,
        })
    }

    pub fn group(&self) -> &Arc<GroupRealization> {
        &self.group
    }

    pub fn parabolics(&self) -> &[SubgroupHandle] {
        &self.parabolics
    }

    pub fn rank(&self) -> usize {
        self.parabolics.len()
    }

    pub fn parabolic_orders(&self) -> Vec<usize> {
        self.parabolics.iter().map(|p| p.order()).collect()
    }

    /// Materializes every coset and every incidence.
    pub fn build(&self) -> Result<BuiltGeometry, CosetError> {
        let rank = self.rank();
        let mut coset_of = Vec::with_capacity(rank);
        let mut reps = Vec::with_capacity(rank);
        let mut offsets = Vec::with_capacity(rank);
        let mut element_types = Vec::new();
        let mut element_labels = Vec::new();
        for (t, parabolic) in self.parabolics.iter().enumerate() {
            let (assignment, representatives) = parabolic.right_coset_partition();
            offsets.push(element_types.len() as u32);
            for c in 0..representatives.len() {
                element_types.push(t);
                element_labels.push(format!("{}:{}", self.type_labels[t], c));
            }
            coset_of.push(assignment);
            reps.push(representatives);
        }

        let mut pair_tests = Vec::with_capacity(rank * (rank - 1) / 2);
        for i in 0..rank {
            for j in (i + 1)..rank {
                let work = self.parabolics[i].order() * self.parabolics[j].order();
                let test = if work <= PRODUCT_CACHE_LIMIT {
                    PairTest::Cached(self.parabolics[i].product_indices(&self.parabolics[j])?)
                } else {
                    PairTest::Scan
                };
                pair_tests.push(test);
            }
        }

        let built = BuiltGeometryParts {
            spec: self,
            coset_of: &coset_of,
            reps: &reps,
            offsets: &offsets,
            pair_tests: &pair_tests,
        };
        let mut edges = Vec::new();
        for i in 0..rank {
            for j in (i + 1)..rank {
                for (ci, &rep_i) in reps[i].iter().enumerate() {
                    for (cj, &rep_j) in reps[j].iter().enumerate() {
                        if built.cosets_intersect_by_reps(i, rep_i, j, rep_j) {
                            edges.push((
                                offsets[i] + ci as u32,
                                offsets[j] + cj as u32,
                            ));
                        }
                    }
                }
            }
        }

        let system = IncidenceSystem::with_labels(
            self.type_labels.clone(),
            element_types,
            element_labels,
            &edges,
        )?;
        Ok(BuiltGeometry {
            spec: self.clone(),
            system,
            coset_of,
            reps,
            offsets,
            pair_tests,
        })
    }
}

#[derive(Debug, Clone)]
enum PairTest {
    /// Sorted element indices of the full product set `G_i ∘ G_j`.
    Cached(Vec<u32>),
    /// Scan the smaller subgroup on each query.
    Scan,
}

/// Borrowed view used during `build`, before the owning struct exists.
struct BuiltGeometryParts<'a> {
    spec: &'a CosetGeometrySpec,
    #[allow(dead_code)]
    coset_of: &'a [Vec<u32>],
    #[allow(dead_code)]
    reps: &'a [Vec<u32>],
    #[allow(dead_code)]
    offsets: &'a [u32],
    pair_tests: &'a [PairTest],
}

impl BuiltGeometryParts<'_> {
    fn cosets_intersect_by_reps(&self, i: usize, rep_i: u32, j: usize, rep_j: u32) -> bool {
        cosets_intersect_impl(
            self.spec.group(),
            &self.spec.parabolics()[i],
            &self.spec.parabolics()[j],
            pair_test_for(self.pair_tests, self.spec.rank(), i, j),
            i < j,
            rep_i,
            rep_j,
        )
    }
}

fn pair_slot(rank: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < rank);
    // Row-major position of (i, j) in the strict upper triangle.
    i * rank - i * (i + 1) / 2 + (j - i - 1)
}

fn pair_test_for(tests: &[PairTest], rank: usize, i: usize, j: usize) -> &PairTest {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    &tests[pair_slot(rank, a, b)]
}

/// Membership test `rep_i ∘ rep_j⁻¹ ∈ G_i ∘ G_j`, which characterizes
/// intersection of the right cosets `G_i·rep_i` and `G_j·rep_j`.
fn cosets_intersect_impl(
    group: &Arc<GroupRealization>,
    sub_i: &SubgroupHandle,
    sub_j: &SubgroupHandle,
    test: &PairTest,
    ordered: bool,
    rep_i: u32,
    rep_j: u32,
) -> bool {
    // The cached product is stored for the pair (min, max); flip the query
    // into that orientation via (a ∘ b⁻¹)⁻¹ = b ∘ a⁻¹.
    let (x, y, first, second) = if ordered {
        (rep_i, rep_j, sub_i, sub_j)
    } else {
        (rep_j, rep_i, sub_j, sub_i)
    };
    let needle = group.compose_indices(x, group.inverse_index(y));
    match test {
        PairTest::Cached(product) => product.binary_search(&needle).is_ok(),
        PairTest::Scan => {
            if first.order() <= second.order() {
                first.member_indices().iter().any(|&h| {
                    second.contains_index(
                        group.compose_indices(group.inverse_index(h), needle),
                    )
                })
            } else {
                second.member_indices().iter().any(|&k| {
                    first.contains_index(
                        group.compose_indices(needle, group.inverse_index(k)),
                    )
                })
            }
        }
    }
}

/// A fully materialized coset incidence system, with maps between cosets,
/// their representatives, and element ids of the underlying system.
#[derive(Debug, Clone)]
pub struct BuiltGeometry {
    spec: CosetGeometrySpec,
    system: IncidenceSystem,
    /// Per type: parent element index -> coset id.
    coset_of: Vec<Vec<u32>>,
    /// Per type: coset id -> least parent element index in that coset.
    reps: Vec<Vec<u32>>,
    /// Per type: element id of the first coset of that type.
    offsets: Vec<u32>,
    pair_tests: Vec<PairTest>,
}

impl BuiltGeometry {
    pub fn spec(&self) -> &CosetGeometrySpec {
        &self.spec
    }

    pub fn system(&self) -> &IncidenceSystem {
        &self.system
    }

    pub fn group(&self) -> &Arc<GroupRealization> {
        self.spec.group()
    }

    pub fn parabolics(&self) -> &[SubgroupHandle] {
        self.spec.parabolics()
    }

    /// Element id of the type-`t` coset containing the parent element `g`.
    pub fn element_containing(&self, t: usize, g: u32) -> u32 {
        self.offsets[t] + self.coset_of[t][g as usize]
    }

    /// Type, coset id, and least member of an element's coset.
    pub fn element_info(&self, element: u32) -> (usize, u32, u32) {
        let t = self.system.type_of(element);
        let c = element - self.offsets[t];
        (t, c, self.reps[t][c as usize])
    }

    /// Parent element indices forming the coset behind `element`, ascending.
    pub fn coset_members(&self, element: u32) -> Vec<u32> {
        let (t, c, _) = self.element_info(element);
        (0..self.group().order() as u32)
            .filter(|&g| self.coset_of[t][g as usize] == c)
            .collect()
    }

    /// Literal intersection test computed from the group product, not from
    /// the already-built incidence graph. Two cosets of the same subgroup
    /// meet exactly when they are equal; across types this coincides with
    /// the incidence relation.
    pub fn cosets_intersect(&self, a: u32, b: u32) -> bool {
        let (ta, _, rep_a) = self.element_info(a);
        let (tb, _, rep_b) = self.element_info(b);
        if ta == tb {
            return a == b;
        }
        cosets_intersect_impl(
            self.group(),
            &self.parabolics()[ta],
            &self.parabolics()[tb],
            pair_test_for(&self.pair_tests, self.spec.rank(), ta, tb),
            ta < tb,
            rep_a,
            rep_b,
        )
    }

    /// The chamber of all cosets containing `g`; every pair meets in `g`.
    pub fn chamber_containing(&self, g: u32) -> Flag {
        Flag::from_elements(
            (0..self.spec.rank())
                .map(|t| self.element_containing(t, g))
                .collect(),
        )
    }

    /// The chamber of the cosets containing the identity.
    pub fn base_chamber(&self) -> Flag {
        self.chamber_containing(self.group().identity_index())
    }

    /// Right multiplication by `g` as a permutation of the element ids.
    /// It preserves types and incidence by construction.
    pub fn action_permutation(&self, g: u32) -> Permutation {
        let group = self.group();
        let mut images = Vec::with_capacity(self.system.size());
        for t in 0..self.spec.rank() {
            for &rep in &self.reps[t] {
                let moved = group.compose_indices(rep, g);
                images.push(self.element_containing(t, moved));
            }
        }
        Permutation::from_images(images).expect("coset action must permute elements")
    }

    /// Action images of the ambient group's generators.
    pub fn action_generators(&self) -> Vec<Permutation> {
        self.group()
            .generator_indices()
            .iter()
            .map(|&g| self.action_permutation(g))
            .collect()
    }

    /// The permutation group generated by the action images; its order can
    /// be smaller than the ambient order when the action has a kernel.
    pub fn action_realization(&self, cap: usize) -> Result<Arc<GroupRealization>, GroupError> {
        GroupRealization::generate(self.system.size(), &self.action_generators(), cap)
    }
}

/// Which of the two candidate cosets realized an adjacent chamber: the one
/// containing the twisting element itself, or the one containing its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjacentForm {
    PairElement,
    PairElementInverse,
}

/// A group with a distinguished generator list `α_1, ..., α_{r-1}` (and
/// `α_0` the identity), from which rank-`r` coset geometries are built: the
/// type-`t` subgroup is generated by all `α_i⁻¹ α_j` with `i, j ≠ t`.
#[derive(Debug, Clone)]
pub struct CPlusSpec {
    group: Arc<GroupRealization>,
    alpha: Vec<u32>,
}

impl CPlusSpec {
    pub fn new(
        degree: usize,
        generators: &[Permutation],
        cap: usize,
    ) -> Result<Self, CosetError> {
        if generators.is_empty() {
            return Err(CosetError::NeedGenerators);
        }
        let group = GroupRealization::generate(degree, generators, cap)?;
        let mut alpha = vec![group.identity_index()];
        alpha.extend_from_slice(group.generator_indices());
        Ok(Self { group, alpha })
    }

    pub fn group(&self) -> &Arc<GroupRealization> {
        &self.group
    }

    /// Number of types: one more than the number of generators.
    pub fn rank(&self) -> usize {
        self.alpha.len()
    }

    /// Element index of `α_i`; `α_0` is the identity.
    pub fn alpha(&self, i: usize) -> u32 {
        self.alpha[i]
    }

    /// Element index of the twisting element `α_i⁻¹ ∘ α_j`.
    pub fn twist(&self, i: usize, j: usize) -> u32 {
        self.group
            .compose_indices(self.group.inverse_index(self.alpha[i]), self.alpha[j])
    }

    /// Subgroup generated by all twisting elements with both endpoints in
    /// `types`; trivial when fewer than two types are given.
    pub fn parabolic(&self, types: &[usize]) -> Result<SubgroupHandle, CosetError> {
        let mut gens = Vec::new();
        for (k, &i) in types.iter().enumerate() {
            if i >= self.rank() {
                return Err(CosetError::TypeIndexOutOfRange(i));
            }
            for &j in &types[k + 1..] {
                if j >= self.rank() {
                    return Err(CosetError::TypeIndexOutOfRange(j));
                }
                gens.push(self.twist(i, j));
            }
        }
        Ok(SubgroupHandle::generated(&self.group, &gens))
    }

    /// The rank-`r` spec whose type-`t` subgroup omits type `t`.
    pub fn geometry_spec(&self) -> Result<CosetGeometrySpec, CosetError> {
        let rank = self.rank();
        let mut parabolics = Vec::with_capacity(rank);
        for t in 0..rank {
            let types: Vec<usize> = (0..rank).filter(|&x| x != t).collect();
            parabolics.push(self.parabolic(&types)?);
        }
        CosetGeometrySpec::new(Arc::clone(&self.group), parabolics)
    }

    /// The chamber adjacent to the base chamber at type `j`, located via the
    /// twisting element for the ordered pair `(i, j)`: of the two type-`j`
    /// cosets containing the twisting element or its inverse, returns the
    /// first that really is incident to the rest of the base chamber and
    /// differs from its type-`j` element.
    pub fn adjacent_chamber(
        &self,
        built: &BuiltGeometry,
        i: usize,
        j: usize,
    ) -> Result<(Flag, AdjacentForm), CosetError> {
        if i >= self.rank() {
            return Err(CosetError::TypeIndexOutOfRange(i));
        }
        if j >= self.rank() || i == j {
            return Err(CosetError::TypeIndexOutOfRange(j));
        }
        let twist = self.twist(i, j);
        let base = built.base_chamber();
        let keep: Vec<u32> = base
            .elements()
            .iter()
            .copied()
            .filter(|&e| built.system().type_of(e) != j)
            .collect();
        let base_j = built.element_containing(j, self.group.identity_index());
        let candidates = [
            (twist, AdjacentForm::PairElement),
            (self.group.inverse_index(twist), AdjacentForm::PairElementInverse),
        ];
        for (candidate, form) in candidates {
            let element = built.element_containing(j, candidate);
            if element == base_j {
                continue;
            }
            if keep.iter().all(|&e| built.system().incident(e, element)) {
                let mut elements = keep.clone();
                elements.push(element);
                return Ok((Flag::from_elements(elements), form));
            }
        }
        Err(CosetError::NoAdjacentChamber { i, j })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ELEMENT_CAP;

    fn perms(degree: usize, lits: &[&str]) -> Vec<Permutation> {
        lits.iter()
            .map(|s| Permutation::parse(degree, s).unwrap())
            .collect()
    }

    /// Rank-3 spec over the full symmetric group on 4 points, with the
    /// type-t subgroup generated by the transpositions other than the t-th.
    fn s4_spec() -> CosetGeometrySpec {
        let group = GroupRealization::generate(
            4,
            &perms(4, &["(0 1)", "(1 2)", "(2 3)"]),
            DEFAULT_ELEMENT_CAP,
        )
        .unwrap();
        let all = ["(0 1)", "(1 2)", "(2 3)"];
        let parabolics: Vec<SubgroupHandle> = (0..3)
            .map(|skip| {
                let gens: Vec<Permutation> = all
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, s)| Permutation::parse(4, s).unwrap())
                    .collect();
                SubgroupHandle::from_permutations(&group, &gens).unwrap()
            })
            .collect();
        CosetGeometrySpec::new(group, parabolics).unwrap()
    }

    #[test]
    fn s4_coset_system_has_expected_shape() {
        let spec = s4_spec();
        assert_eq!(spec.parabolic_orders(), vec![6, 4, 6]);
        let built = spec.build().unwrap();
        assert_eq!(built.system().element_counts(), vec![4, 6, 4]);
        assert_eq!(built.system().size(), 14);
        assert!(built.system().geometry_check(100_000).unwrap().is_geometry);
        assert_eq!(built.system().chambers(100_000).unwrap().len(), 24);
    }

    #[test]
    fn algebraic_intersection_matches_literal_cosets() {
        let built = s4_spec().build().unwrap();
        let n = built.system().size() as u32;
        for a in 0..n {
            for b in 0..n {
                let naive = {
                    let ma = built.coset_members(a);
                    let mb = built.coset_members(b);
                    ma.iter().any(|x| mb.contains(x))
                };
                assert_eq!(built.cosets_intersect(a, b), naive, "pair ({a}, {b})");
                // Distinct same-type cosets are disjoint, so away from the
                // diagonal the incidence relation agrees with intersection.
                if a != b {
                    assert_eq!(built.system().incident(a, b), naive);
                }
            }
        }
    }

    #[test]
    fn base_chamber_and_coset_lookup_are_consistent() {
        let built = s4_spec().build().unwrap();
        let base = built.base_chamber();
        assert_eq!(base.len(), 3);
        for &e in base.elements() {
            let members = built.coset_members(e);
            assert!(members.contains(&built.group().identity_index()));
            let (_, _, rep) = built.element_info(e);
            assert_eq!(members[0], rep);
        }
        for g in 0..built.group().order() as u32 {
            let chamber = built.chamber_containing(g);
            assert!(built.system().validate_flag(chamber.elements()).is_ok());
        }
    }

    #[test]
    fn action_is_a_type_preserving_homomorphism() {
        let built = s4_spec().build().unwrap();
        let g = built.group().clone();
        for a in [1u32, 5, 11] {
            for b in [2u32, 7, 19] {
                let left = built
                    .action_permutation(a)
                    .compose(&built.action_permutation(b))
                    .unwrap();
                let right = built.action_permutation(g.compose_indices(a, b));
                assert_eq!(left, right);
            }
        }
        let pa = built.action_permutation(17);
        for e in 0..built.system().size() as u32 {
            assert_eq!(
                built.system().type_of(e),
                built.system().type_of(pa.apply(e))
            );
        }
        assert!(built
            .action_permutation(g.identity_index())
            .is_identity());
    }

    #[test]
    fn action_realization_closes_to_a_group() {
        let built = s4_spec().build().unwrap();
        let action = built.action_realization(DEFAULT_ELEMENT_CAP).unwrap();
        // The action is faithful here, so the orders agree.
        assert_eq!(action.order(), built.group().order());
    }

    #[test]
    fn generator_spec_produces_the_omitted_type_subgroups() {
        let spec = CPlusSpec::new(
            4,
            &perms(4, &["(0 1 2)", "(1 2 3)"]),
            DEFAULT_ELEMENT_CAP,
        )
        .unwrap();
        assert_eq!(spec.rank(), 3);
        assert_eq!(spec.group().order(), 12);
        let geometry = spec.geometry_spec().unwrap();
        assert_eq!(geometry.parabolic_orders(), vec![3, 3, 3]);
        let built = geometry.build().unwrap();
        assert_eq!(built.system().element_counts(), vec![4, 4, 4]);
        assert!(built.system().geometry_check(100_000).unwrap().is_geometry);

        // The type-0 subgroup is generated by twists not involving type 0.
        let expected = SubgroupHandle::generated(spec.group(), &[spec.twist(1, 2)]);
        assert!(expected.equals(&geometry.parabolics()[0]));
    }

    #[test]
    fn adjacent_chambers_exist_for_every_ordered_pair() {
        let spec = CPlusSpec::new(
            4,
            &perms(4, &["(0 1 2)", "(1 3 2)"]),
            DEFAULT_ELEMENT_CAP,
        )
        .unwrap();
        let built = spec.geometry_spec().unwrap().build().unwrap();
        let base = built.base_chamber();
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let (chamber, _) = spec.adjacent_chamber(&built, i, j).unwrap();
                assert!(built.system().validate_flag(chamber.elements()).is_ok());
                let differing: Vec<usize> = (0..3)
                    .filter(|&t| {
                        let in_base = base.elements()[t];
                        !chamber.contains(in_base)
                    })
                    .collect();
                assert_eq!(differing, vec![j], "pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn foreign_subgroups_are_rejected() {
        let group = GroupRealization::generate(
            4,
            &perms(4, &["(0 1)", "(1 2)", "(2 3)"]),
            DEFAULT_ELEMENT_CAP,
        )
        .unwrap();
        let other = GroupRealization::generate(
            5,
            &perms(5, &["(0 1)"]),
            DEFAULT_ELEMENT_CAP,
        )
        .unwrap();
        let bad = SubgroupHandle::whole(&other);
        let good = SubgroupHandle::trivial(&group);
        let err = CosetGeometrySpec::new(group, vec![good, bad]).unwrap_err();
        assert_eq!(err, CosetError::ForeignSubgroup(1));
    }
}
