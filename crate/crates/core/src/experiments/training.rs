use serde::{Deserialize, Serialize};

use crate::aco::{run_colony, AntDecay, ColonyConfig, Contribution, ParamSource};
use crate::error::{Error, Result};
use crate::population::{ParamGrid, StageBuckets, DEFAULT_POOL};
use crate::rng::{self, tag};
use crate::tsp::{Instance, RegionSpec};

/// Which contributors are allowed to shape the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivalRule {
    /// Every contributor counts.
    None,
    /// Problems are abandoned after the cutoff iteration.
    EarlyOnly,
    /// Problems run to the end but only contributions after the cutoff count.
    LateOnly,
    /// The colony shrinks after the cutoff; every contributor counts.
    Decay,
}

impl std::str::FromStr for SurvivalRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "early-only" => Ok(Self::EarlyOnly),
            "late-only" => Ok(Self::LateOnly),
            "decay" => Ok(Self::Decay),
            other => Err(Error::invalid(format!("unknown survival rule {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    pub n: usize,
    pub region: RegionSpec,
    /// Colony settings per graph; `colony.t_max` is the per-graph budget.
    pub colony: ColonyConfig,
    pub max_graphs: usize,
    /// Graphs between equilibrium checks.
    pub window: usize,
    /// Equilibrium when the grid moved less than this (total variation) over one window.
    pub tv_threshold: f64,
    pub pool: usize,
    pub staged: bool,
    pub stage_bounds: Vec<usize>,
    pub survival: SurvivalRule,
    pub survival_cutoff: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            n: 100,
            region: RegionSpec::unit_square(),
            colony: ColonyConfig::default(),
            max_graphs: 500,
            window: 50,
            tv_threshold: 0.02,
            pool: DEFAULT_POOL,
            staged: false,
            stage_bounds: vec![5, 30, 100],
            survival: SurvivalRule::None,
            survival_cutoff: 50,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::invalid(format!("instance size must be at least 3, got {}", self.n)));
        }
        if self.window < 1 || !(self.tv_threshold > 0.0) || self.pool < 1 {
            return Err(Error::invalid("window, tv_threshold and pool must be positive"));
        }
        self.colony.validate()
    }

    /// Colony settings actually used per graph under the survival rule.
    pub fn effective_colony(&self) -> ColonyConfig {
        let mut c = self.colony.clone();
        match self.survival {
            SurvivalRule::EarlyOnly => c.t_max = c.t_max.min(self.survival_cutoff),
            SurvivalRule::Decay => c.ant_decay = Some(AntDecay { after: self.survival_cutoff, ..c.ant_decay.unwrap_or_default() }),
            SurvivalRule::None | SurvivalRule::LateOnly => {}
        }
        c
    }

    fn admits(&self, c: &Contribution) -> bool {
        self.survival != SurvivalRule::LateOnly || c.t > self.survival_cutoff
    }

    pub fn initial_model(&self) -> Result<Model> {
        let grid = ParamGrid::uniform();
        self.model_from(grid)
    }

    /// Fresh model (plain or staged, per the config) initialized from `grid`.
    pub fn model_from(&self, grid: ParamGrid) -> Result<Model> {
        if self.staged {
            let t_max = self.effective_colony().t_max;
            let mut upper: Vec<usize> = self.stage_bounds.iter().copied().filter(|&b| b < t_max).collect();
            upper.push(t_max);
            Ok(Model::Staged(StageBuckets::new(upper, &grid)?))
        } else {
            Ok(Model::Plain(grid))
        }
    }
}

/// A trained population: one grid, or one grid per problem stage.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Plain(ParamGrid),
    Staged(StageBuckets),
}

impl Model {
    pub fn evolve(&self, contributors: &[Contribution], pool: usize) -> Result<Model> {
        Ok(match self {
            Model::Plain(g) => Model::Plain(g.evolve(contributors, pool)?),
            Model::Staged(s) => Model::Staged(s.evolve(contributors, pool)?),
        })
    }

    /// Largest per-grid total-variation distance to `other`.
    pub fn tv_distance(&self, other: &Model) -> Result<f64> {
        match (self, other) {
            (Model::Plain(a), Model::Plain(b)) => a.tv_distance(b),
            (Model::Staged(a), Model::Staged(b)) if a.grids().len() == b.grids().len() => {
                a.grids().iter().zip(b.grids()).try_fold(0.0f64, |m, (x, y)| Ok(m.max(x.tv_distance(y)?)))
            }
            _ => Err(Error::invalid("cannot compare plain and staged models")),
        }
    }

    /// The single grid, or the equal mixture of the stage grids.
    pub fn flattened(&self) -> ParamGrid {
        match self {
            Model::Plain(g) => g.clone(),
            Model::Staged(s) => s.union(),
        }
    }

    /// Run `f` with a parameter source drawing from this model.
    pub fn with_source<T>(&self, f: impl FnOnce(&dyn ParamSource) -> T) -> T {
        match self {
            Model::Plain(g) => f(&g.sampler()),
            Model::Staged(s) => f(&s.sampler()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphLog {
    pub graph: usize,
    pub n_contributors: usize,
    pub best_length: f64,
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub model: Model,
    pub converged: bool,
    pub graphs_used: usize,
    pub log: Vec<GraphLog>,
    /// Every admitted contribution, in graph order.
    pub contributors: Vec<Contribution>,
}

/// Train from the uniform grid.
pub fn train_population(cfg: &TrainingConfig, seed: u64, progress: &mut dyn FnMut(&GraphLog)) -> Result<TrainingOutcome> {
    train_from(cfg, cfg.initial_model()?, seed, progress)
}

/// Solve one random graph after another, folding each graph's contributors
/// into the model, until the model settles or the graph budget runs out.
pub fn train_from(cfg: &TrainingConfig, init: Model, seed: u64, progress: &mut dyn FnMut(&GraphLog)) -> Result<TrainingOutcome> {
    cfg.validate()?;
    let colony = cfg.effective_colony();
    let mut model = init;
    let mut checkpoint = model.clone();
    let mut log = Vec::new();
    let mut contributors = Vec::new();
    let mut converged = false;

    for graph in 0..cfg.max_graphs {
        let inst = Instance::generate(cfg.n, cfg.region, rng::derive_seed(seed, &[tag::TRAIN, graph as u64, 0]))?;
        let run_seed = rng::derive_seed(seed, &[tag::TRAIN, graph as u64, 1]);
        let trace = model.with_source(|src| run_colony(&inst, src, &colony, run_seed))?;
        let admitted: Vec<Contribution> = trace.contributors().filter(|c| cfg.admits(c)).copied().collect();
        model = model.evolve(&admitted, cfg.pool)?;

        let entry = GraphLog { graph, n_contributors: admitted.len(), best_length: trace.best_tour.length() };
        progress(&entry);
        log.push(entry);
        contributors.extend(admitted);

        if (graph + 1) % cfg.window == 0 {
            if model.tv_distance(&checkpoint)? < cfg.tv_threshold {
                converged = true;
                break;
            }
            checkpoint = model.clone();
        }
    }

    Ok(TrainingOutcome { model, converged, graphs_used: log.len(), log, contributors })
}
