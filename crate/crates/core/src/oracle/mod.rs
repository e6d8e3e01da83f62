//! Independent checks of the abstraction: a grid discretization of the model
//! solved as a finite MDP, and exact bounded-horizon probabilities under
//! explicit table schedulers on both the model and its interval MDP.

mod bounded;
mod discretize;
mod mdp;
mod scheduler;

pub use bounded::{bounded_reach_cdpta, bounded_reach_imdp, mimic_scheduler};
pub use discretize::{discretize, DiscretizationLevel, GridMove};
pub use mdp::{mdp_reach, FiniteMdp, MdpValues};
pub use scheduler::{BPath, BStep, Move, SchedulerKind, TableScheduler};
