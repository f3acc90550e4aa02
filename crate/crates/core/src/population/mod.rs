//! The heuristic-parameter distribution and its contributor-driven evolution.

mod grid;
mod stages;
mod stats;

pub use grid::{Axis, GridFile, GridMeta, GridSampler, ParamGrid, DEFAULT_POOL};
pub use stages::{StageBuckets, StagedSampler, DEFAULT_STAGE_BOUNDS};
pub use stats::{summarize, GridSummary};
