//! Training to equilibrium and the comparative studies built on it.

mod analysis;
mod error_curve;
mod scenarios;
mod training;

pub use analysis::{
    improvement_vs_stage, stage_analysis, stage_scatter_csv, BucketStats, ImprovementReport, StageImprovement, StageReport,
};
pub use error_curve::{community_curves, error_curve, eval_instance, mean_stderr, paired_difference, ErrorCurve, EvalConfig};
pub use scenarios::{run_scenario, stage_grid, Scenario, ScenarioConfig, ScenarioReport, TrendCheck, SCHEMA_VERSION};
pub use training::{train_from, train_population, GraphLog, Model, SurvivalRule, TrainingConfig, TrainingOutcome};
