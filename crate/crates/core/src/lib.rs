//! Upper bounds for multiplicative matchings in finite groups, computed
//! from two-sided ideal filtrations of the modular group algebra, with an
//! exhaustive search oracle to test every bound against on small groups.
//!
//! The pipeline: build a group ([`group`]), form its algebra over a prime
//! field ([`algebra`] on top of [`linalg`]), verify a descending ideal
//! chain and minimize its rate function ([`bounds`]), and compare the
//! resulting densities against exact maximum matchings ([`matching`]).
//! The [`psl2`] module constructs the explicit three-step tower inside
//! F_p[PSL2(F_p)] and cross-validates its density against a closed form.

pub mod algebra;
pub mod bounds;
pub mod group;
pub mod linalg;
mod mat2;
pub mod matching;
pub mod psl2;

pub use algebra::{AlgebraElement, AlgebraError, GroupAlgebra, Ideal};
pub use bounds::{
    bound_from_filtration, minimize_rate, rate_function, slice_rank_bound, soft_bound_density,
    square_zero_constant, square_zero_density, square_zero_filtration, sum_element_filtration,
    verify_vanishing, BoundError, BoundReport, CheckStatus, Filtration, FiltrationStep,
    HypothesisRecord, RateFunction, RateMinimum, RateTerm,
};
pub use group::{build_builtin, group_from_json, Group, GroupError, GroupHom, GroupSpec};
pub use linalg::{
    intersect, is_prime, nullspace, preimage, rref, sum, FpMatrix, FpSubspace, LinalgError,
    SubspaceBuilder,
};
pub use matching::{
    greedy_lower_bound, max_matching_exact, verify_matching, Matching, MatchingError,
    SearchResult,
};
pub use psl2::{
    annihilator_ideal, build_irreps, build_tower, closed_form_density, closed_form_infimum,
    delta_from_tower, delta_p, limit_infimum, matrix_coefficient_ideal, DeltaReport,
    ModularIrrep, Psl2Error, Psl2Tower, TowerChecks, TowerDims,
};
