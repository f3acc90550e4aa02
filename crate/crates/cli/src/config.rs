use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use colony_core::experiments::{ScenarioConfig, SurvivalRule};
use colony_core::tsp::{PointLaw, RegionSpec, Shape};

pub const THREADS_ENV: &str = "COLONY_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "colony-lab", version, about = "Ant-colony model of cooperative research")]
pub struct Cli {
    /// Worker threads (default: all cores). COLONY_LAB_THREADS takes precedence.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one colony on one random instance.
    Solve(SolveArgs),
    /// Train the parameter distribution on random instances.
    Train(TrainArgs),
    /// Run one of the comparative studies.
    Experiment(ExperimentArgs),
}

/// Options shared by every command.
#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output run directory.
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Instance size N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Iterations per graph.
    #[arg(long = "t-max")]
    pub t_max: Option<usize>,
    /// Apply 2-opt to every ant's tour.
    #[arg(long)]
    pub speedup: bool,
    /// Region shape: unit-square, rectangle:W,H or circle:R.
    #[arg(long)]
    pub region: Option<String>,
    /// Point law: uniform, gaussian or triangular.
    #[arg(long)]
    pub law: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Parameter grid JSON to sample ants from (default: uniform).
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Instance JSON to solve instead of generating one.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Also compute the reference optimum and report the relative error.
    #[arg(long)]
    pub reference: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    /// Keep one grid per problem stage.
    #[arg(long)]
    pub staged: bool,
    /// Survival rule: none, early-only, late-only or decay.
    #[arg(long)]
    pub survival: Option<String>,
    /// Graph budget.
    #[arg(long = "max-graphs")]
    pub max_graphs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// scale-sweep, stage, speedup, survival or communities.
    pub scenario: String,
    #[command(flatten)]
    pub common: Common,
    /// Sizes for scale-sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Number of independent communities.
    #[arg(long)]
    pub k: Option<usize>,
    /// Evaluation graphs per error curve.
    #[arg(long)]
    pub graphs: Option<usize>,
    /// Iterations per evaluation graph.
    #[arg(long = "eval-t-max")]
    pub eval_t_max: Option<usize>,
    /// Training graph budget.
    #[arg(long = "max-graphs")]
    pub max_graphs: Option<usize>,
    /// Full-scale evaluation: 500 graphs per curve.
    #[arg(long)]
    pub full: bool,
    /// Persist reference optima here and reuse them across runs.
    #[arg(long = "reference-cache")]
    pub reference_cache: Option<PathBuf>,
}

pub fn load(path: Option<&Path>) -> anyhow::Result<ScenarioConfig> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            let cfg: ScenarioConfig = serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?;
            Ok(cfg)
        }
    }
}

/// Malformed configuration or flag value.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_region(shape: Option<&str>, law: Option<&str>, base: RegionSpec) -> anyhow::Result<RegionSpec> {
    let shape = match shape {
        None => base.shape,
        Some("unit-square") => Shape::UnitSquare,
        Some(s) => {
            let (kind, dims) = s.split_once(':').ok_or_else(|| ConfigError(format!("bad region {s:?}")))?;
            let nums: Vec<f64> = dims
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| ConfigError(format!("bad region dimensions {dims:?}")))?;
            match (kind, nums.as_slice()) {
                ("rectangle", [w, h]) => Shape::Rectangle { w: *w, h: *h },
                ("circle", [r]) => Shape::Circle { r: *r },
                _ => bail!(ConfigError(format!("bad region {s:?}"))),
            }
        }
    };
    let law = match law {
        None => base.law,
        Some("uniform") => PointLaw::Uniform,
        Some("gaussian") => PointLaw::Gaussian,
        Some("triangular") => PointLaw::Triangular,
        Some(other) => bail!(ConfigError(format!("unknown point law {other:?}"))),
    };
    Ok(RegionSpec { shape, law })
}

/// Fold the shared flags into a config loaded from file (or defaults).
pub fn apply_common(cfg: &mut ScenarioConfig, c: &Common) -> anyhow::Result<()> {
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(n) = c.n {
        cfg.training.n = n;
        cfg.evaluation.n = n;
    }
    if let Some(t) = c.t_max {
        cfg.training.colony.t_max = t;
        cfg.evaluation.colony.t_max = t;
    }
    if c.speedup {
        cfg.training.colony.speedup = true;
        cfg.evaluation.colony.speedup = true;
    }
    let region = parse_region(c.region.as_deref(), c.law.as_deref(), cfg.training.region)?;
    cfg.training.region = region;
    cfg.evaluation.region = region;
    Ok(())
}

pub fn parse_survival(s: &str) -> anyhow::Result<SurvivalRule> {
    s.parse::<SurvivalRule>().map_err(|e| ConfigError(e.to_string()).into())
}

/// Thread count from the environment, then the flag; `None` means all cores.
pub fn resolve_threads(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if v.trim() == "auto" => Ok(None),
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| ConfigError(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
            Ok(Some(n.max(1)))
        }
        Err(_) => Ok(flag.map(|n| n.max(1))),
    }
}
