//! Coset incidence geometries from finite permutation groups.
//!
//! The crate builds incidence systems whose elements are right cosets of a
//! family of subgroups, then decides the structural properties that matter
//! for classifying them: being a geometry, thinness/firmness, connectivity,
//! residual connectivity, flag transitivity, and chirality. Everything is
//! deterministic: elements, cosets, and reports come out in a fixed order.

pub mod coset;
pub mod criteria;
pub mod group;
pub mod incidence;
pub mod perm;
pub mod symmetry;

pub use coset::{
    AdjacentForm, BuiltGeometry, CPlusSpec, CosetError, CosetGeometrySpec,
};
pub use criteria::{
    extension_transitivity, involution_intersection_condition, parabolic_union_generation,
    product_condition, product_of_members, twist_intersection_condition, CriteriaError,
    ExtensionTransitivityReport, GenerationReport, GenerationViolation, IcReport, IcStrategy,
    IcViolation, InvolutionIcReport, ProductOrder, TwistIcReport,
};
pub use group::{GroupError, GroupRealization, SubgroupHandle, DEFAULT_ELEMENT_CAP};
pub use incidence::{
    ChamberComplex, Flag, FlagOrbitReducer, GeometryCheck, IncidenceError, IncidenceSystem,
    RcOptions, RcReport, Residue, ThinnessReport, TypeSet, DEFAULT_FLAG_BUDGET,
};
pub use perm::{PermError, Permutation};
pub use symmetry::{
    action_chamber_orbit_count, action_transitive_on_types, action_transitivity_audit,
    audit_chiral_thinness, automorphisms, automorphisms_brute_force, automorphisms_refinement,
    classify_chambers, flag_orbits, is_automorphism, AutGroup, AutOptions, AutRoute, ChamberClass,
    ChamberClassification, HypertopeVerdict, PermutationOrbitReducer, SymmetryError,
    TransitivityAudit,
};
