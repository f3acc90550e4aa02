//! Simulation engine for an ant-colony model of cooperative research.
//!
//! Ants carrying individual heuristic exponents `(alpha, beta)` solve random
//! Euclidean TSP instances with a modified ant colony optimizer. Ants that
//! beat the colony's best-known tour are contributors, and their parameters
//! are mixed back into the population distribution after every graph.
//!
//! - [`tsp`]: instances, tours, greedy and exact/reference optima
//! - [`aco`]: transition rule, pheromone update, 2-opt, colony runs
//! - [`population`]: the parameter grid and its evolution
//! - [`experiments`]: training and the comparative studies

pub mod aco;
pub mod error;
pub mod experiments;
pub mod format;
pub mod population;
pub mod rng;
pub mod tsp;

pub use aco::{AntParams, ColonyConfig, RunTrace};
pub use error::{Error, Result};
pub use population::{ParamGrid, StageBuckets};
pub use tsp::{Instance, RegionSpec, Tour};
