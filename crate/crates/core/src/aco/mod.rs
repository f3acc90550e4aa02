//! The modified ant colony: transition rule, rank-weighted deposit with
//! long-step penalty, shrinking winner fraction, and optional 2-opt.

mod colony;
mod params;
mod pheromone;
pub mod two_opt;
mod walk;

pub use colony::{contributors_csv, run_colony, Contribution, FixedParams, IterationRecord, ParamSource, RunTrace};
pub use params::{AntDecay, AntParams, ColonyConfig, PSchedule};
pub use pheromone::{long_step_penalty, rank_weight, select_winners, PheromoneField};
pub use two_opt::{is_two_opt_fixpoint, two_opt};
pub use walk::{ant_walk, transition_probabilities, LogDistances, LogTrail, WalkContext};
