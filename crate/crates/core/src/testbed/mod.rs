//! Small monotone submodular instances under matroid constraints: exact
//! optimum by enumeration, the greedy baseline, and the approximation target
//! that the planned ℓ guarantees.

mod algorithms;
mod instance;
mod oracle;
mod random;
mod report;

use thiserror::Error;

pub use algorithms::{
    brute_force_opt, check_monotone_submodular, greedy, subset_query_cost, Solution, Verdict,
    Witness,
};
pub use instance::{
    BlockFile, CoverageInstance, ElementSet, InstanceFile, Matroid, MatroidFile, WeightText,
    MAX_GROUND,
};
pub use oracle::{f_eval, OracleCounter, SetFunction, TabularFunction};
pub use random::{find_gap_instance, random_instance, RandomParams};
pub use report::{ratio_report, RatioReport, NOT_IMPLEMENTED_LABEL};

use crate::exact::ExactError;
use crate::planner::PlanError;

/// Exhaustive submodularity checks enumerate all pairs `S ⊆ T`.
pub const MAX_CHECK_GROUND: usize = 12;
/// Brute force enumerates all `2^n` subsets.
pub const MAX_BRUTE_GROUND: usize = 20;
/// Largest size-ℓ set whose subsets are materialized.
pub const MAX_SUBSET_ELL: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestbedError {
    #[error("malformed instance: {0}")]
    Format(String),
    #[error("weight of item `{item}`: {message}")]
    Weight { item: String, message: String },
    #[error("weight of item `{item}` must be positive, got {weight}")]
    NonPositiveWeight { item: String, weight: String },
    #[error("element `{element}` covers unknown item `{item}`")]
    UnknownItem { element: String, item: String },
    #[error("uniform rank {rank} exceeds ground size {n}")]
    RankTooLarge { rank: usize, n: usize },
    #[error("partition block names unknown element `{0}`")]
    BlockUnknownMember(String),
    #[error("element `{0}` appears in more than one block")]
    BlockOverlap(String),
    #[error("element `{0}` is in no block")]
    BlockMissing(String),
    #[error("{op} supports at most {limit} ground elements, got {n}")]
    GroundTooLarge {
        n: usize,
        limit: usize,
        op: &'static str,
    },
    #[error("set {0} is not a subset of the ground set")]
    NotSubset(ElementSet),
    #[error("subset enumeration supports ℓ <= {MAX_SUBSET_ELL}, got {0}")]
    EllTooLarge(u32),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
