//! The finite interval MDP abstraction of a model: the constant set and its
//! partition, the region / endpoint-indicator construction, and exports.

mod build;
mod export;
mod partition;
mod system;

pub use build::{
    assignment_to_valuation, build_imdp, endpoint_target_prob, region_targets, size_bounds, state_counts,
    valuation_to_assignment, ImdpAction, ImdpState, RegionImdp, Side,
};
pub use export::{imdp_to_dot, imdp_to_text};
pub use partition::{boundary_set, interval_partition, interval_sat, BoundaryIdx, ClockPredicate, IntervalB};
pub use system::Imdp;
