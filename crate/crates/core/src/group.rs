//! Finite permutation groups realized as explicit, sorted element tables,
//! plus subgroup handles tied to a shared parent realization.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::perm::{PermError, Permutation};

/// Default ceiling on the number of elements enumerated during closure.
pub const DEFAULT_ELEMENT_CAP: usize = 100_000;

/// Groups up to this order get a cached multiplication table on first use.
const MULT_TABLE_MAX_ORDER: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element cap {cap} exceeded while closing the generated group")]
    CapExceeded { cap: usize },
    #[error("permutation {0} is not an element of the ambient group")]
    NotAMember(String),
    #[error("subgroup handles belong to different parent groups")]
    ParentMismatch,
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A finite permutation group with every element materialized.
///
/// Elements are stored in ascending lexicographic order of their image lists,
/// so element index 0 is always the identity and indices are stable across
/// runs. All subgroup and coset machinery works in terms of these indices.
#[derive(Debug)]
pub struct GroupRealization {
    degree: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, u32>,
    inverse: Vec<u32>,
    generator_indices: Vec<u32>,
    mult_table: OnceLock<Vec<u32>>,
}

impl GroupRealization {
    /// Closes `generators` under composition, failing once more than `cap`
    /// elements appear. An empty generator list yields the trivial group.
    pub fn generate(
        degree: usize,
        generators: &[Permutation],
        cap: usize,
    ) -> Result<Arc<Self>, GroupError> {
        let identity = Permutation::identity(degree)?;
        for g in generators {
            if g.degree() != degree {
                return Err(GroupError::Perm(PermError::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                }));
            }
        }
        let mut seen: HashMap<Permutation, ()> = HashMap::new();
        seen.insert(identity.clone(), ());
        let mut queue = vec![identity];
        let mut head = 0;
        while head < queue.len() {
            let current = queue[head].clone();
            head += 1;
            for g in generators {
                let next = current.compose_unchecked(g);
                if !seen.contains_key(&next) {
                    if seen.len() >= cap {
                        return Err(GroupError::CapExceeded { cap });
                    }
                    seen.insert(next.clone(), ());
                    queue.push(next);
                }
            }
        }
        Ok(Self::from_closed_elements(queue, generators))
    }

    /// Wraps an element set already known to be closed under composition.
    pub(crate) fn from_closed_elements(
        mut elements: Vec<Permutation>,
        generators: &[Permutation],
    ) -> Arc<Self> {
        elements.sort();
        debug_assert!(elements.windows(2).all(|w| w[0] != w[1]));
        debug_assert!(elements[0].is_identity());
        let degree = elements[0].degree();
        let index: HashMap<Permutation, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        let inverse = elements.iter().map(|p| index[&p.inverse()]).collect();
        let generator_indices = generators.iter().map(|g| index[g]).collect();
        Arc::new(Self {
            degree,
            elements,
            index,
            inverse,
            generator_indices,
            mult_table: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: u32) -> &Permutation {
        &self.elements[i as usize]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<u32> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }

    /// Index of the identity; always 0 because sorting puts it first.
    pub fn identity_index(&self) -> u32 {
        0
    }

    pub fn inverse_index(&self, i: u32) -> u32 {
        self.inverse[i as usize]
    }

    /// Indices of the generators passed at construction time.
    pub fn generator_indices(&self) -> &[u32] {
        &self.generator_indices
    }

    /// Index of `element(a) ∘ element(b)` (apply `a` first, then `b`).
    ///
    /// Small groups transparently build and reuse a full multiplication
    /// table; larger ones compose and look the product up each time.
    pub fn compose_indices(&self, a: u32, b: u32) -> u32 {
        let n = self.order();
        if n <= MULT_TABLE_MAX_ORDER {
            let table = self.mult_table.get_or_init(|| {
                let mut t = vec![0u32; n * n];
                for x in 0..n {
                    for y in 0..n {
                        let product = self.elements[x].compose_unchecked(&self.elements[y]);
                        t[x * n + y] = self.index[&product];
                    }
                }
                t
            });
            table[a as usize * n + b as usize]
        } else {
            let product = self.elements[a as usize].compose_unchecked(&self.elements[b as usize]);
            self.index[&product]
        }
    }

    /// Greedy small generating set for a closed subset: scan candidates in
    /// index order and keep each one not yet generated by those kept so far.
    pub fn minimal_generating_indices(&self, member_indices: &[u32]) -> Vec<u32> {
        let target = member_indices.len();
        let mut kept: Vec<u32> = Vec::new();
        let mut closure = vec![self.identity_index()];
        for &candidate in member_indices {
            if closure.len() == target {
                break;
            }
            if closure.binary_search(&candidate).is_ok() {
                continue;
            }
            kept.push(candidate);
            closure = self.close_indices(&kept);
        }
        kept
    }

    /// Closure of the given element indices under composition, ascending.
    pub fn close_indices(&self, generator_indices: &[u32]) -> Vec<u32> {
        let mut in_set = vec![false; self.order()];
        in_set[self.identity_index() as usize] = true;
        let mut queue = vec![self.identity_index()];
        let mut head = 0;
        while head < queue.len() {
            let current = queue[head];
            head += 1;
            for &g in generator_indices {
                let next = self.compose_indices(current, g);
                if !in_set[next as usize] {
                    in_set[next as usize] = true;
                    queue.push(next);
                }
            }
        }
        queue.sort_unstable();
        queue
    }
}

/// A subgroup of a shared parent realization, held as sorted element indices.
#[derive(Debug, Clone)]
pub struct SubgroupHandle {
    parent: Arc<GroupRealization>,
    generator_indices: Vec<u32>,
    member_indices: Vec<u32>,
}

impl SubgroupHandle {
    /// Subgroup generated by the given element indices of `parent`.
    pub fn generated(parent: &Arc<GroupRealization>, generator_indices: &[u32]) -> Self {
        let member_indices = parent.close_indices(generator_indices);
        let mut gens: Vec<u32> = generator_indices.to_vec();
        gens.sort_unstable();
        gens.dedup();
        Self {
            parent: Arc::clone(parent),
            generator_indices: gens,
            member_indices,
        }
    }

    /// Subgroup generated by permutations, which must lie in `parent`.
    pub fn from_permutations(
        parent: &Arc<GroupRealization>,
        generators: &[Permutation],
    ) -> Result<Self, GroupError> {
        let mut indices = Vec::with_capacity(generators.len());
        for g in generators {
            let i = parent
                .index_of(g)
                .ok_or_else(|| GroupError::NotAMember(g.cycle_string()))?;
            indices.push(i);
        }
        Ok(Self::generated(parent, &indices))
    }

    pub fn whole(parent: &Arc<GroupRealization>) -> Self {
        Self {
            parent: Arc::clone(parent),
            generator_indices: parent.generator_indices().to_vec(),
            member_indices: (0..parent.order() as u32).collect(),
        }
    }

    pub fn trivial(parent: &Arc<GroupRealization>) -> Self {
        Self {
            parent: Arc::clone(parent),
            generator_indices: Vec::new(),
            member_indices: vec![parent.identity_index()],
        }
    }

    pub fn parent(&self) -> &Arc<GroupRealization> {
        &self.parent
    }

    pub fn order(&self) -> usize {
        self.member_indices.len()
    }

    pub fn member_indices(&self) -> &[u32] {
        &self.member_indices
    }

    pub fn generator_indices(&self) -> &[u32] {
        &self.generator_indices
    }

    pub fn contains_index(&self, i: u32) -> bool {
        self.member_indices.binary_search(&i).is_ok()
    }

    pub fn permutations(&self) -> impl Iterator<Item = &Permutation> {
        self.member_indices.iter().map(|&i| self.parent.element(i))
    }

    /// True when both handles refer to the same realization, either by
    /// pointer identity or by identical element tables.
    pub fn same_parent(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent)
            || (self.parent.degree() == other.parent.degree()
                && self.parent.elements() == other.parent.elements())
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.same_parent(other) && self.member_indices == other.member_indices
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.same_parent(other)
            && self
                .member_indices
                .iter()
                .all(|&i| other.contains_index(i))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, GroupError> {
        if !self.same_parent(other) {
            return Err(GroupError::ParentMismatch);
        }
        let member_indices: Vec<u32> = self
            .member_indices
            .iter()
            .copied()
            .filter(|&i| other.contains_index(i))
            .collect();
        let generator_indices = self.parent.minimal_generating_indices(&member_indices);
        Ok(Self {
            parent: Arc::clone(&self.parent),
            generator_indices,
            member_indices,
        })
    }

    /// Subgroup generated by the union of all members of `parts`.
    pub fn generated_by_union(
        parent: &Arc<GroupRealization>,
        parts: &[&SubgroupHandle],
    ) -> Result<Self, GroupError> {
        let mut gens: Vec<u32> = Vec::new();
        for part in parts {
            if !Arc::ptr_eq(parent, &part.parent)
                && !(parent.degree() == part.parent.degree()
                    && parent.elements() == part.parent.elements())
            {
                return Err(GroupError::ParentMismatch);
            }
            gens.extend_from_slice(&part.member_indices);
        }
        gens.sort_unstable();
        gens.dedup();
        Ok(Self::generated(parent, &gens))
    }

    /// Sorted, deduplicated indices of all products `a ∘ b` with `a` from
    /// `self` and `b` from `other`.
    pub fn product_indices(&self, other: &Self) -> Result<Vec<u32>, GroupError> {
        if !self.same_parent(other) {
            return Err(GroupError::ParentMismatch);
        }
        let mut hit = vec![false; self.parent.order()];
        for &a in &self.member_indices {
            for &b in &other.member_indices {
                hit[self.parent.compose_indices(a, b) as usize] = true;
            }
        }
        Ok(collect_marked(&hit))
    }

    /// Partition of the parent into right cosets of this subgroup.
    ///
    /// Returns `(coset_of, representatives)`: `coset_of[g]` is the coset id
    /// of parent element `g`, and `representatives[c]` is the least element
    /// index in coset `c`. Coset ids are assigned in order of their least
    /// element, so id 0 is the subgroup itself.
    pub fn right_coset_partition(&self) -> (Vec<u32>, Vec<u32>) {
        let n = self.parent.order();
        let mut coset_of = vec![u32::MAX; n];
        let mut representatives = Vec::new();
        for g in 0..n as u32 {
            if coset_of[g as usize] != u32::MAX {
                continue;
            }
            let id = representatives.len() as u32;
            representatives.push(g);
            for &h in &self.member_indices {
                coset_of[self.parent.compose_indices(h, g) as usize] = id;
            }
        }
        debug_assert!(coset_of.iter().all(|&c| c != u32::MAX));
        (coset_of, representatives)
    }
}

fn collect_marked(hit: &[bool]) -> Vec<u32> {
    hit.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i as u32))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s4() -> Arc<GroupRealization> {
        let gens: Vec<Permutation> = ["(0 1)", "(1 2)", "(2 3)"]
            .iter()
            .map(|s| Permutation::parse(4, s).unwrap())
            .collect();
        GroupRealization::generate(4, &gens, DEFAULT_ELEMENT_CAP).unwrap()
    }

    #[test]
    fn closure_of_transpositions_is_s4() {
        let g = s4();
        assert_eq!(g.order(), 24);
        assert_eq!(g.degree(), 4);
        assert!(g.element(0).is_identity());
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = GroupRealization::generate(5, &[], 10).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        let gens: Vec<Permutation> = ["(0 1)", "(0 1 2 3 4)"]
            .iter()
            .map(|s| Permutation::parse(5, s).unwrap())
            .collect();
        let err = GroupRealization::generate(5, &gens, 50).unwrap_err();
        assert_eq!(err, GroupError::CapExceeded { cap: 50 });
        assert_eq!(
            GroupRealization::generate(5, &gens, 120).unwrap().order(),
            120
        );
    }

    #[test]
    fn inverse_table_matches_permutation_inverse() {
        let g = s4();
        for i in 0..g.order() as u32 {
            assert_eq!(g.element(g.inverse_index(i)), &g.element(i).inverse());
        }
    }

    #[test]
    fn compose_indices_agrees_with_direct_composition() {
        let g = s4();
        for a in 0..g.order() as u32 {
            for b in 0..g.order() as u32 {
                let direct = g.element(a).compose(g.element(b)).unwrap();
                assert_eq!(g.element(g.compose_indices(a, b)), &direct);
            }
        }
    }

    #[test]
    fn subgroup_generation_and_membership() {
        let g = s4();
        let swap = g.index_of(&Permutation::parse(4, "(0 1)").unwrap()).unwrap();
        let h = SubgroupHandle::generated(&g, &[swap]);
        assert_eq!(h.order(), 2);
        assert!(h.contains_index(g.identity_index()));
        assert!(h.contains_index(swap));
        assert!(!SubgroupHandle::trivial(&g).contains_index(swap));
        assert_eq!(SubgroupHandle::whole(&g).order(), 24);
    }

    #[test]
    fn from_permutations_rejects_outsiders() {
        let g = SubgroupHandle::from_permutations(
            &s4(),
            &[Permutation::parse(4, "(0 1 2)").unwrap()],
        )
        .unwrap();
        assert_eq!(g.order(), 3);
        let a4_only = GroupRealization::generate(
            4,
            &[Permutation::parse(4, "(0 1 2)").unwrap(), Permutation::parse(4, "(1 2 3)").unwrap()],
            100,
        )
        .unwrap();
        let outside = SubgroupHandle::from_permutations(
            &a4_only,
            &[Permutation::parse(4, "(0 1)").unwrap()],
        );
        assert!(matches!(outside, Err(GroupError::NotAMember(_))));
    }

    #[test]
    fn intersection_of_two_point_stabilizer_style_subgroups() {
        let g = s4();
        let left = SubgroupHandle::from_permutations(
            &g,
            &[
                Permutation::parse(4, "(0 1)").unwrap(),
                Permutation::parse(4, "(1 2)").unwrap(),
            ],
        )
        .unwrap();
        let right = SubgroupHandle::from_permutations(
            &g,
            &[
                Permutation::parse(4, "(1 2)").unwrap(),
                Permutation::parse(4, "(2 3)").unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(left.order(), 6);
        assert_eq!(right.order(), 6);
        let meet = left.intersect(&right).unwrap();
        assert_eq!(meet.order(), 2);
        assert!(meet.is_subset_of(&left) && meet.is_subset_of(&right));

        let product = left.product_indices(&right).unwrap();
        assert_eq!(product.len(), 6 * 6 / 2);

        let join = SubgroupHandle::generated_by_union(&g, &[&left, &right]).unwrap();
        assert_eq!(join.order(), 24);
    }

    #[test]
    fn parent_mismatch_is_detected() {
        let a = s4();
        let b = GroupRealization::generate(5, &[Permutation::parse(5, "(0 1)").unwrap()], 10)
            .unwrap();
        let ha = SubgroupHandle::whole(&a);
        let hb = SubgroupHandle::whole(&b);
        assert_eq!(ha.intersect(&hb).unwrap_err(), GroupError::ParentMismatch);
        // Equal element tables count as the same parent even across Arcs.
        let a2 = s4();
        assert!(SubgroupHandle::whole(&a2).same_parent(&ha));
    }

    #[test]
    fn right_cosets_partition_the_parent() {
        let g = s4();
        let h = SubgroupHandle::from_permutations(
            &g,
            &[
                Permutation::parse(4, "(0 1)").unwrap(),
                Permutation::parse(4, "(1 2)").unwrap(),
            ],
        )
        .unwrap();
        let (coset_of, reps) = h.right_coset_partition();
        assert_eq!(reps.len(), 4);
        assert_eq!(coset_of[g.identity_index() as usize], 0);
        for (c, &rep) in reps.iter().enumerate() {
            assert_eq!(coset_of[rep as usize], c as u32);
            let size = coset_of.iter().filter(|&&x| x == c as u32).count();
            assert_eq!(size, h.order());
        }
    }

    #[test]
    fn minimal_generating_indices_reaches_the_whole_group() {
        let g = s4();
        let all: Vec<u32> = (0..g.order() as u32).collect();
        let gens = g.minimal_generating_indices(&all);
        assert!(gens.len() <= 3);
        assert_eq!(g.close_indices(&gens).len(), 24);
    }

    proptest! {
        #[test]
        fn generated_subgroup_order_divides_parent_order(
            picks in proptest::collection::vec(0usize..24, 0..4)
        ) {
            let g = s4();
            let indices: Vec<u32> = picks.iter().map(|&i| i as u32).collect();
            let h = SubgroupHandle::generated(&g, &indices);
            prop_assert_eq!(24 % h.order(), 0);
        }

        #[test]
        fn coset_partition_is_even(picks in proptest::collection::vec(0usize..24, 1..3)) {
            let g = s4();
            let indices: Vec<u32> = picks.iter().map(|&i| i as u32).collect();
            let h = SubgroupHandle::generated(&g, &indices);
            let (coset_of, reps) = h.right_coset_partition();
            prop_assert_eq!(reps.len() * h.order(), g.order());
            for c in 0..reps.len() as u32 {
                let size = coset_of.iter().filter(|&&x| x == c).count();
                prop_assert_eq!(size, h.order());
            }
        }
    }
}
