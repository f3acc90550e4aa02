//! Random Euclidean TSP instances, tours, and optimum lengths.

mod exact;
mod instance;
mod reference;
pub(crate) mod tour;

pub use exact::{exact_optimum, EXACT_MAX_N};
pub use instance::{Instance, InstanceFile, PointLaw, RegionSpec, Shape, MIN_SEPARATION};
pub use reference::{reference_method, reference_optimum, ReferenceCache, ReferenceMethod, DEFAULT_RESTARTS};
pub use tour::{is_permutation, nearest_neighbor_tour, tour_length, Tour};
