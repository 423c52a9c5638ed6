//! Exact k-chain counting in the Boolean lattice, closed-form lower bounds,
//! centered extremal families, a shifting local search and brute-force
//! oracles for small ground sets.

pub mod arith;
pub mod bounds;
pub mod chains;
mod error;
pub mod extremal;
pub mod lattice;
pub mod lym;
pub mod matching;
pub mod oracle;
pub mod shift;
pub mod text;

pub use bounds::{
    all_chains_lower, erdos_katona_lower, evaluate as evaluate_bound, forced_missing_middle,
    k_middle_levels_lower, k_plus_one_levels_lower, long_step_chains_lower, middle_sum, r_param,
    stability_gains, stability_lower, BoundInput, BoundName, BoundParams, BoundReport,
};
pub use chains::{
    count_2chains_cross, count_chains_step_constrained, count_k_chains, count_k_chains_with,
    owner_counts, owner_of, perm_weight_chain, perm_weight_set, Backend, Chain, ChainCountReport,
    OwnerCount, PermutationWeight,
};
pub use error::{Error, Result};
pub use extremal::{
    canonical_family, check_extremal_2chain, conjectured_min, onto_boundary_replacement,
    outward_replacement, saturated_example, ExtremalCertificate, Replacement,
};
pub use lattice::{m_of, random_family, ElementSet, HalfInteger, LevelProfile, SetFamily, MAX_N};
pub use lym::{lym_audit, LymAudit};
pub use matching::{hall_decomposition, max_matching, BipartiteGraph, HallDecomposition, Matching};
pub use oracle::{
    branch_and_bound_min, count_k_chains_naive, exhaustive_min, verify_conjecture,
    verify_iff_characterization, ConjectureReport, IffReport, OracleResult,
};
pub use shift::{minimize, shift_step, strip_extremes, ShiftKind, ShiftStep, ShiftTrace};
pub use text::{parse_family, write_family, SetNotation};
