//! Incidence systems over a finite type set: flag enumeration, residues,
//! and the structural checks (geometry, thinness, connectivity) that the
//! classification layer builds on.

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

/// Default ceiling on flag-enumeration work for one structural check.
pub const DEFAULT_FLAG_BUDGET: usize = 1_000_000;

/// Fill colors used by the DOT export, one per type (cycled beyond 8).
const DOT_PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc949", "#9c755f",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IncidenceError {
    #[error("rank {0} exceeds the supported maximum of 32 types")]
    RankTooLarge(usize),
    #[error("element {element} has type {found}, but the system has {rank} types")]
    TypeOutOfRange { element: u32, found: usize, rank: usize },
    #[error("element id {0} is out of range")]
    ElementOutOfRange(u32),
    #[error("edge ({a}, {b}) joins two elements of type {t}; incident elements must have distinct types")]
    SameTypeEdge { a: u32, b: u32, t: usize },
    #[error("{kind} count {found} does not match the expected count {expected}")]
    LabelCountMismatch { kind: &'static str, found: usize, expected: usize },
    #[error("elements {a} and {b} are not incident, so the given set is not a flag")]
    NotAFlag { a: u32, b: u32 },
    #[error("flag enumeration exceeded its budget of {budget}")]
    FlagBudgetExceeded { budget: usize },
}

/// A subset of the type indices `{0, ..., rank-1}`, packed into a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TypeSet(u32);

impl TypeSet {
    pub const EMPTY: TypeSet = TypeSet(0);

    pub fn full(rank: usize) -> Self {
        debug_assert!(rank <= 32);
        if rank == 32 {
            TypeSet(u32::MAX)
        } else {
            TypeSet((1u32 << rank) - 1)
        }
    }

    pub fn singleton(t: usize) -> Self {
        TypeSet(1u32 << t)
    }

    pub fn from_types(types: &[usize]) -> Self {
        types.iter().fold(TypeSet::EMPTY, |s, &t| s.with(t))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, t: usize) -> bool {
        t < 32 && self.0 & (1 << t) != 0
    }

    #[must_use]
    pub fn with(self, t: usize) -> Self {
        TypeSet(self.0 | (1 << t))
    }

    #[must_use]
    pub fn without(self, t: usize) -> Self {
        TypeSet(self.0 & !(1 << t))
    }

    pub fn union(self, other: Self) -> Self {
        TypeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        TypeSet(self.0 & other.0)
    }

    pub fn complement_in(self, rank: usize) -> Self {
        TypeSet(Self::full(rank).0 & !self.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Member types in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&t| self.contains(t))
    }

    /// Every subset of `{0, ..., rank-1}` in ascending bitmask order.
    pub fn all_subsets(rank: usize) -> impl Iterator<Item = TypeSet> {
        let top = Self::full(rank).0 as u64;
        (0..=top).map(|b| TypeSet(b as u32))
    }
}

/// A set of pairwise incident elements with pairwise distinct types,
/// stored as ascending element ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Flag(Vec<u32>);

impl Flag {
    pub fn empty() -> Self {
        Flag(Vec::new())
    }

    pub fn from_elements(mut elements: Vec<u32>) -> Self {
        elements.sort_unstable();
        debug_assert!(elements.windows(2).all(|w| w[0] != w[1]));
        Flag(elements)
    }

    pub fn elements(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, element: u32) -> bool {
        self.0.binary_search(&element).is_ok()
    }

    #[must_use]
    pub fn with(&self, element: u32) -> Self {
        let mut elements = self.0.clone();
        elements.push(element);
        Flag::from_elements(elements)
    }
}

/// Outcome of the geometry check: either every maximal flag is a chamber,
/// or `witness` holds a maximal flag that cannot be extended to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometryCheck {
    pub is_geometry: bool,
    pub witness: Option<Flag>,
}

/// Sizes of all rank-1 residues: thin means every one has exactly two
/// elements, firm means at least two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThinnessReport {
    pub thin: bool,
    pub firm: bool,
    pub min_panel: Option<usize>,
    pub max_panel: Option<usize>,
    /// A corank-1 flag whose residue size differs from 2.
    pub thin_witness: Option<Flag>,
    /// A corank-1 flag whose residue has fewer than 2 elements.
    pub firm_witness: Option<Flag>,
}

/// Outcome of the residual-connectivity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RcReport {
    pub residually_connected: bool,
    /// A flag of corank at least 2 whose residue is disconnected.
    pub witness: Option<Flag>,
    /// Number of residues actually inspected (after any orbit reduction).
    pub flags_examined: usize,
}

/// Hook for cutting residual-connectivity work down to orbit representatives
/// when a group action on the system is known. Connectivity of a residue is
/// invariant along an orbit, so one flag per orbit suffices.
pub trait FlagOrbitReducer {
    fn reduce(&self, system: &IncidenceSystem, flags: Vec<Flag>) -> Vec<Flag>;
}

/// Options for [`IncidenceSystem::residual_connectivity`].
#[derive(Default)]
pub struct RcOptions<'a> {
    /// Flag-enumeration budget; 0 means [`DEFAULT_FLAG_BUDGET`].
    pub flag_budget: usize,
    pub reducer: Option<&'a dyn FlagOrbitReducer>,
}

/// A residue: the subsystem of elements incident to every element of a flag,
/// over the types the flag does not use.
#[derive(Debug, Clone)]
pub struct Residue {
    pub system: IncidenceSystem,
    /// Residue element id -> element id in the parent system.
    pub element_map: Vec<u32>,
    /// Residue type index -> type index in the parent system.
    pub type_map: Vec<usize>,
}

/// All chambers together with their type-adjacency structure.
/// `adjacency[c][t]` lists the chambers that differ from chamber `c` in
/// exactly the type-`t` element.
#[derive(Debug, Clone)]
pub struct ChamberComplex {
    pub chambers: Vec<Flag>,
    pub adjacency: Vec<Vec<Vec<u32>>>,
}

impl ChamberComplex {
    pub fn index_of(&self, chamber: &Flag) -> Option<u32> {
        self.chambers.binary_search(chamber).ok().map(|i| i as u32)
    }
}

/// A finite incidence system: typed elements plus a symmetric incidence
/// relation that only ever joins elements of distinct types.
#[derive(Debug, Clone)]
pub struct IncidenceSystem {
    type_labels: Vec<String>,
    element_types: Vec<u8>,
    element_labels: Vec<String>,
    neighbors: Vec<Vec<u32>>,
    geometry_cache: OnceLock<GeometryCheck>,
}

impl IncidenceSystem {
    /// Builds a system with default numeric labels.
    pub fn new(
        rank: usize,
        element_types: Vec<usize>,
        edges: &[(u32, u32)],
    ) -> Result<Self, IncidenceError> {
        let type_labels = (0..rank).map(|t| t.to_string()).collect();
        let element_labels = (0..element_types.len()).map(|e| e.to_string()).collect();
        Self::with_labels(type_labels, element_types, element_labels, edges)
    }

    /// Builds a system, validating every edge and label count.
    pub fn with_labels(
        type_labels: Vec<String>,
        element_types: Vec<usize>,
        element_labels: Vec<String>,
        edges: &[(u32, u32)],
    ) -> Result<Self, IncidenceError> {
        let rank = type_labels.len();
        if rank > 32 {
            return Err(IncidenceError::RankTooLarge(rank));
        }
        let n = element_types.len();
        if element_labels.len() != n {
            return Err(IncidenceError::LabelCountMismatch {
                kind: "element label",
                found: element_labels.len(),
                expected: n,
            });
        }
        let mut types = Vec::with_capacity(n);
        for (e, &t) in element_types.iter().enumerate() {
            if t >= rank {
                return Err(IncidenceError::TypeOutOfRange {
                    element: e as u32,
                    found: t,
                    rank,
                });
            }
            types.push(t as u8);
        }
        let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a as usize >= n {
                return Err(IncidenceError::ElementOutOfRange(a));
            }
            if b as usize >= n {
                return Err(IncidenceError::ElementOutOfRange(b));
            }
            if types[a as usize] == types[b as usize] {
                return Err(IncidenceError::SameTypeEdge {
                    a,
                    b,
                    t: types[a as usize] as usize,
                });
            }
            neighbors[a as usize].push(b);
            neighbors[b as usize].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            type_labels,
            element_types: types,
            element_labels,
            neighbors,
            geometry_cache: OnceLock::new(),
        })
    }

    pub fn rank(&self) -> usize {
        self.type_labels.len()
    }

    pub fn size(&self) -> usize {
        self.element_types.len()
    }

    pub fn type_of(&self, element: u32) -> usize {
        self.element_types[element as usize] as usize
    }

    pub fn type_label(&self, t: usize) -> &str {
        &self.type_labels[t]
    }

    pub fn element_label(&self, element: u32) -> &str {
        &self.element_labels[element as usize]
    }

    pub fn elements_of_type(&self, t: usize) -> Vec<u32> {
        (0..self.size() as u32)
            .filter(|&e| self.type_of(e) == t)
            .collect()
    }

    /// Number of elements of each type, by type index.
    pub fn element_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.rank()];
        for &t in &self.element_types {
            counts[t as usize] += 1;
        }
        counts
    }

    pub fn neighbors(&self, element: u32) -> &[u32] {
        &self.neighbors[element as usize]
    }

    pub fn incident(&self, a: u32, b: u32) -> bool {
        self.neighbors[a as usize].binary_search(&b).is_ok()
    }

    /// Elements incident to every element of `flag`; the whole element set
    /// for the empty flag. Always ascending.
    pub fn common_neighbors(&self, flag: &Flag) -> Vec<u32> {
        let mut iter = flag.elements().iter();
        let Some(&first) = iter.next() else {
            return (0..self.size() as u32).collect();
        };
        let mut pool = self.neighbors[first as usize].clone();
        for &e in iter {
            pool = intersect_sorted(&pool, &self.neighbors[e as usize]);
        }
        pool
    }

    /// Validates that the ids form a flag of this system.
    pub fn validate_flag(&self, elements: &[u32]) -> Result<Flag, IncidenceError> {
        for &e in elements {
            if e as usize >= self.size() {
                return Err(IncidenceError::ElementOutOfRange(e));
            }
        }
        for (k, &a) in elements.iter().enumerate() {
            for &b in &elements[k + 1..] {
                if a == b || !self.incident(a, b) {
                    return Err(IncidenceError::NotAFlag { a, b });
                }
            }
        }
        Ok(Flag::from_elements(elements.to_vec()))
    }

    pub fn flag_types(&self, flag: &Flag) -> TypeSet {
        flag.elements()
            .iter()
            .fold(TypeSet::EMPTY, |s, &e| s.with(self.type_of(e)))
    }

    /// Labels of a flag's elements, in ascending element-id order.
    pub fn flag_labels(&self, flag: &Flag) -> Vec<String> {
        flag.elements()
            .iter()
            .map(|&e| self.element_label(e).to_string())
            .collect()
    }

    /// All flags whose type set is exactly `types`, in a deterministic
    /// order (types ascending, candidate elements ascending).
    pub fn flags_of_types(&self, types: TypeSet, budget: usize) -> Result<Vec<Flag>, IncidenceError> {
        let order: Vec<usize> = types.iter().filter(|&t| t < self.rank()).collect();
        let mut out = Vec::new();
        let mut visited = 0usize;
        let pool: Vec<u32> = (0..self.size() as u32).collect();
        let mut current = Vec::new();
        self.flags_rec(&order, 0, &pool, &mut current, &mut out, &mut visited, budget)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn flags_rec(
        &self,
        order: &[usize],
        depth: usize,
        pool: &[u32],
        current: &mut Vec<u32>,
        out: &mut Vec<Flag>,
        visited: &mut usize,
        budget: usize,
    ) -> Result<(), IncidenceError> {
        *visited += 1;
        if *visited > budget {
            return Err(IncidenceError::FlagBudgetExceeded { budget });
        }
        if depth == order.len() {
            out.push(Flag::from_elements(current.clone()));
            return Ok(());
        }
        let t = order[depth];
        let picks: Vec<u32> = pool
            .iter()
            .copied()
            .filter(|&e| self.type_of(e) == t)
            .collect();
        for e in picks {
            let next_pool = intersect_sorted(pool, &self.neighbors[e as usize]);
            current.push(e);
            self.flags_rec(order, depth + 1, &next_pool, current, out, visited, budget)?;
            current.pop();
        }
        Ok(())
    }

    /// All chambers (flags using every type).
    pub fn chambers(&self, budget: usize) -> Result<Vec<Flag>, IncidenceError> {
        self.flags_of_types(TypeSet::full(self.rank()), budget)
    }

    /// Decides whether every maximal flag is a chamber, which is equivalent
    /// to every non-chamber flag having a proper extension. The verdict is
    /// cached; a budget error is not.
    pub fn geometry_check(&self, budget: usize) -> Result<&GeometryCheck, IncidenceError> {
        if let Some(cached) = self.geometry_cache.get() {
            return Ok(cached);
        }
        let mut visited = 0usize;
        let mut current = Vec::new();
        let witness = self.geometry_rec(&mut current, None, &mut visited, budget)?;
        let result = GeometryCheck {
            is_geometry: witness.is_none(),
            witness,
        };
        Ok(self.geometry_cache.get_or_init(|| result))
    }

    /// Depth-first walk over all flags by ascending ids; returns the first
    /// maximal non-chamber flag found, searching exhaustively.
    fn geometry_rec(
        &self,
        current: &mut Vec<u32>,
        last: Option<u32>,
        visited: &mut usize,
        budget: usize,
    ) -> Result<Option<Flag>, IncidenceError> {
        *visited += 1;
        if *visited > budget {
            return Err(IncidenceError::FlagBudgetExceeded { budget });
        }
        let flag = Flag::from_elements(current.clone());
        let extensions = self.common_neighbors(&flag);
        if extensions.is_empty() && current.len() < self.rank() {
            return Ok(Some(flag));
        }
        let lower = last.map_or(0, |l| l + 1);
        for &e in extensions.iter().filter(|&&e| e >= lower) {
            current.push(e);
            if let Some(w) = self.geometry_rec(current, Some(e), visited, budget)? {
                return Ok(Some(w));
            }
            current.pop();
        }
        Ok(None)
    }

    /// Connectivity of the incidence graph on all elements; empty and
    /// one-element systems count as connected.
    pub fn is_connected(&self) -> bool {
        let all: Vec<u32> = (0..self.size() as u32).collect();
        self.subset_connected(&all)
    }

    /// Connectivity of the incidence graph induced on `subset`; the empty
    /// subset counts as connected.
    pub fn subset_connected(&self, subset: &[u32]) -> bool {
        let Some(&start) = subset.first() else {
            return true;
        };
        let mut member = vec![false; self.size()];
        for &e in subset {
            member[e as usize] = true;
        }
        let mut seen = vec![false; self.size()];
        seen[start as usize] = true;
        let mut queue = vec![start];
        let mut reached = 1usize;
        while let Some(e) = queue.pop() {
            for &nb in &self.neighbors[e as usize] {
                if member[nb as usize] && !seen[nb as usize] {
                    seen[nb as usize] = true;
                    reached += 1;
                    queue.push(nb);
                }
            }
        }
        reached == subset.len()
    }

    /// The residue of a flag as a standalone system, with labels carried
    /// over and maps back to parent ids and types.
    pub fn residue(&self, flag: &Flag) -> Result<Residue, IncidenceError> {
        let flag = self.validate_flag(flag.elements())?;
        let flag_types = self.flag_types(&flag);
        let element_map = self.common_neighbors(&flag);
        let type_map: Vec<usize> = (0..self.rank()).filter(|&t| !flag_types.contains(t)).collect();
        let type_back: HashMap<usize, usize> =
            type_map.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let id_back: HashMap<u32, u32> = element_map
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as u32))
            .collect();
        let mut edges = Vec::new();
        for (new_a, &old_a) in element_map.iter().enumerate() {
            for &old_b in &self.neighbors[old_a as usize] {
                if let Some(&new_b) = id_back.get(&old_b) {
                    if (new_a as u32) < new_b {
                        edges.push((new_a as u32, new_b));
                    }
                }
            }
        }
        let system = IncidenceSystem::with_labels(
            type_map.iter().map(|&t| self.type_labels[t].clone()).collect(),
            element_map
                .iter()
                .map(|&e| type_back[&self.type_of(e)])
                .collect(),
            element_map
                .iter()
                .map(|&e| self.element_labels[e as usize].clone())
                .collect(),
            &edges,
        )?;
        Ok(Residue {
            system,
            element_map,
            type_map,
        })
    }

    /// Checks that the residue of every flag of corank at least 2, the empty
    /// flag included, is connected. Systems of rank at most 1 pass vacuously.
    pub fn residual_connectivity(&self, options: &RcOptions<'_>) -> Result<RcReport, IncidenceError> {
        let budget = if options.flag_budget == 0 {
            DEFAULT_FLAG_BUDGET
        } else {
            options.flag_budget
        };
        let mut examined = 0usize;
        if self.rank() >= 2 {
            let mut remaining = budget;
            for types in TypeSet::all_subsets(self.rank()) {
                if self.rank() - types.len() < 2 {
                    continue;
                }
                let flags = self.flags_of_types(types, remaining)?;
                remaining = remaining.saturating_sub(flags.len().max(1));
                let flags = match options.reducer {
                    Some(reducer) => reducer.reduce(self, flags),
                    None => flags,
                };
                for flag in flags {
                    examined += 1;
                    let residue_elements = self.common_neighbors(&flag);
                    if !self.subset_connected(&residue_elements) {
                        return Ok(RcReport {
                            residually_connected: false,
                            witness: Some(flag),
                            flags_examined: examined,
                        });
                    }
                }
            }
        }
        Ok(RcReport {
            residually_connected: true,
            witness: None,
            flags_examined: examined,
        })
    }

    /// Residual connectivity restricted to subflags of one chamber.
    ///
    /// For a geometry on which some group acts transitively on chambers,
    /// every flag is the image of a subflag of any fixed chamber, so this
    /// check is equivalent to the full one at a fraction of the cost.
    pub fn residual_connectivity_at_chamber(&self, chamber: &Flag) -> Result<RcReport, IncidenceError> {
        let chamber = self.validate_flag(chamber.elements())?;
        let mut examined = 0usize;
        let ids = chamber.elements();
        for mask in 0u64..(1u64 << ids.len()) {
            let subset: Vec<u32> = ids
                .iter()
                .enumerate()
                .filter_map(|(k, &e)| ((mask >> k) & 1 == 1).then_some(e))
                .collect();
            let flag = Flag::from_elements(subset);
            if self.rank() - flag.len() < 2 {
                continue;
            }
            examined += 1;
            let residue_elements = self.common_neighbors(&flag);
            if !self.subset_connected(&residue_elements) {
                return Ok(RcReport {
                    residually_connected: false,
                    witness: Some(flag),
                    flags_examined: examined,
                });
            }
        }
        Ok(RcReport {
            residually_connected: true,
            witness: None,
            flags_examined: examined,
        })
    }

    /// Sizes of all rank-1 residues, with thin/firm verdicts.
    pub fn thinness(&self, budget: usize) -> Result<ThinnessReport, IncidenceError> {
        let mut report = ThinnessReport {
            thin: true,
            firm: true,
            min_panel: None,
            max_panel: None,
            thin_witness: None,
            firm_witness: None,
        };
        let mut remaining = budget;
        for t in 0..self.rank() {
            let types = TypeSet::full(self.rank()).without(t);
            let flags = self.flags_of_types(types, remaining)?;
            remaining = remaining.saturating_sub(flags.len().max(1));
            for flag in flags {
                let size = self.common_neighbors(&flag).len();
                report.min_panel = Some(report.min_panel.map_or(size, |m| m.min(size)));
                report.max_panel = Some(report.max_panel.map_or(size, |m| m.max(size)));
                if size != 2 && report.thin_witness.is_none() {
                    report.thin = false;
                    report.thin_witness = Some(flag.clone());
                }
                if size < 2 && report.firm_witness.is_none() {
                    report.firm = false;
                    report.firm_witness = Some(flag);
                }
            }
        }
        Ok(report)
    }

    /// All chambers plus, for each chamber and type, the chambers adjacent
    /// to it at that type (same elements everywhere else).
    pub fn chamber_complex(&self, budget: usize) -> Result<ChamberComplex, IncidenceError> {
        let mut chambers = self.chambers(budget)?;
        chambers.sort();
        let mut adjacency: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); self.rank()]; chambers.len()];
        // `t` indexes the inner dimension of `adjacency`, not the outer one.
        #[allow(clippy::needless_range_loop)]
        for t in 0..self.rank() {
            let mut buckets: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
            for (c, chamber) in chambers.iter().enumerate() {
                let key: Vec<u32> = chamber
                    .elements()
                    .iter()
                    .copied()
                    .filter(|&e| self.type_of(e) != t)
                    .collect();
                buckets.entry(key).or_default().push(c as u32);
            }
            for bucket in buckets.values() {
                for &c in bucket {
                    adjacency[c as usize][t] = bucket.iter().copied().filter(|&o| o != c).collect();
                }
            }
        }
        Ok(ChamberComplex { chambers, adjacency })
    }

    /// Graphviz DOT rendering of the incidence graph, colored by type.
    pub fn to_dot(&self, graph_name: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("graph \"{graph_name}\" {{\n"));
        out.push_str("  node [style=filled];\n");
        for e in 0..self.size() as u32 {
            let color = DOT_PALETTE[self.type_of(e) % DOT_PALETTE.len()];
            out.push_str(&format!(
                "  n{e} [label=\"{}\" fillcolor=\"{color}\"];\n",
                self.element_label(e)
            ));
        }
        for a in 0..self.size() as u32 {
            for &b in &self.neighbors[a as usize] {
                if a < b {
                    out.push_str(&format!("  n{a} -- n{b};\n"));
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Intersection of two ascending slices, ascending.
pub(crate) fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
