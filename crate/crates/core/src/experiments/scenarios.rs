//! End-to-end studies that write a self-describing run directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::analysis::{improvement_vs_stage, stage_analysis, stage_scatter_csv};
use super::error_curve::{community_curves, error_curve, paired_difference, ErrorCurve, EvalConfig};
use super::training::{train_from, train_population, Model, SurvivalRule, TrainingConfig, TrainingOutcome};
use crate::aco::{contributors_csv, AntDecay};
use crate::error::{Error, Result};
use crate::population::{summarize, GridMeta, ParamGrid};
use crate::rng::{self, tag};
use crate::tsp::ReferenceCache;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    ScaleSweep,
    Stage,
    Speedup,
    Survival,
    Communities,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [Self::ScaleSweep, Self::Stage, Self::Speedup, Self::Survival, Self::Communities];

    pub fn name(self) -> &'static str {
        match self {
            Self::ScaleSweep => "scale-sweep",
            Self::Stage => "stage",
            Self::Speedup => "speedup",
            Self::Survival => "survival",
            Self::Communities => "communities",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|sc| sc.name() == s).ok_or_else(|| {
            Error::invalid(format!("unknown scenario {s:?}; expected one of scale-sweep, stage, speedup, survival, communities"))
        })
    }
}

/// Everything a scenario needs; serialized verbatim as `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub code_version: String,
    pub seed: u64,
    pub training: TrainingConfig,
    pub evaluation: EvalConfig,
    /// Instance sizes of the scale sweep.
    pub sizes: Vec<usize>,
    /// Community count of the communities scenario.
    pub communities: usize,
    /// Staged training starts from the trained time-independent grid.
    pub stage_warm_start: bool,
    /// Survival-rule training starts from the normally trained grid.
    pub survival_warm_start: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: 1,
            training: TrainingConfig::default(),
            evaluation: EvalConfig::default(),
            sizes: vec![10, 20, 50, 100, 200, 500],
            communities: 2,
            stage_warm_start: true,
            survival_warm_start: false,
        }
    }
}

/// Named pass/fail trend observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl TrendCheck {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub checks: Vec<TrendCheck>,
    /// Invariant violations found while running; empty on a healthy run.
    pub invariant_failures: Vec<String>,
    pub summary: Value,
}

struct RunDir {
    root: PathBuf,
}

impl RunDir {
    fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf() })
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.root.join(name), contents)?;
        Ok(())
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    dir: RunDir,
    cache: &'a ReferenceCache,
    log: &'a mut dyn FnMut(&str),
    invariant_failures: Vec<String>,
}

impl Ctx<'_> {
    fn train(&mut self, label: &str, cfg: &TrainingConfig, init: Option<Model>, stream: u64) -> Result<TrainingOutcome> {
        let seed = rng::derive_seed(self.cfg.seed, &[tag::TRAIN, stream]);
        let log = &mut *self.log;
        let mut progress = |g: &super::GraphLog| {
            if (g.graph + 1).is_multiple_of(10) {
                log(&format!("[{label}] graph {} contributors {} best {:.6}", g.graph + 1, g.n_contributors, g.best_length));
            }
        };
        let out = match init {
            Some(m) => train_from(cfg, m, seed, &mut progress)?,
            None => train_population(cfg, seed, &mut progress)?,
        };
        (self.log)(&format!("[{label}] trained on {} graphs, converged={}", out.graphs_used, out.converged));
        self.check_model(label, &out.model);
        self.write_model(label, &out, cfg)?;
        Ok(out)
    }

    fn write_model(&self, label: &str, out: &TrainingOutcome, cfg: &TrainingConfig) -> Result<()> {
        let meta = GridMeta { graphs_trained: out.graphs_used, pool: cfg.pool, schedule: format!("{:?}", cfg.colony.p_schedule) };
        match &out.model {
            Model::Plain(g) => {
                self.dir.write_json(&format!("grid_{label}.json"), &g.to_file(meta))?;
                self.dir.write(&format!("grid_{label}.csv"), &g.weights_csv())?;
            }
            Model::Staged(s) => {
                for (b, g) in s.grids().iter().enumerate() {
                    self.dir.write_json(&format!("grid_{label}_stage{}.json", b + 1), &g.to_file(meta.clone()))?;
                    self.dir.write(&format!("grid_{label}_stage{}.csv", b + 1), &g.weights_csv())?;
                }
            }
        }
        self.dir.write(&format!("contributors_{label}.csv"), &contributors_csv(&out.contributors))
    }

    fn check_model(&mut self, label: &str, model: &Model) {
        let grids: Vec<&ParamGrid> = match model {
            Model::Plain(g) => vec![g],
            Model::Staged(s) => s.grids().iter().collect(),
        };
        for g in grids {
            let sum: f64 = g.weights().iter().sum();
            if (sum - 1.0).abs() > 1e-9 || g.weights().iter().any(|w| *w < 0.0) {
                self.invariant_failures.push(format!("grid {label} is not a normalized distribution (sum {sum})"));
            }
        }
    }

    fn curve(&mut self, label: &str, model: &Model, eval: &EvalConfig) -> Result<ErrorCurve> {
        let seed = rng::derive_seed(self.cfg.seed, &[tag::EVAL]);
        (self.log)(&format!("[{label}] evaluating on {} graphs", eval.n_graphs));
        let curve = error_curve(model, eval, seed, self.cache)?;
        self.check_curve(label, &curve);
        self.dir.write(&format!("error_curve_{label}.csv"), &curve.to_csv())?;
        Ok(curve)
    }

    fn check_curve(&mut self, label: &str, curve: &ErrorCurve) {
        for g in &curve.per_graph {
            if g.windows(2).any(|w| w[1] > w[0]) {
                self.invariant_failures.push(format!("error curve {label} increases in t"));
                return;
            }
        }
    }
}

fn grid_summary_json(grid: &ParamGrid) -> Value {
    let s = summarize(grid);
    json!({
        "mode_alpha": s.mode_alpha,
        "mode_beta": s.mode_beta,
        "mode_tied": s.mode_tied,
        "mean_alpha": s.mean_alpha,
        "mean_beta": s.mean_beta,
        "correlation": s.correlation,
        "correlation_degenerate": s.correlation_degenerate,
    })
}

fn curve_json(c: &ErrorCurve) -> Value {
    let t_max = c.epsilon.len();
    let at = |t: usize| if t <= t_max { json!(c.at(t)) } else { Value::Null };
    json!({
        "fingerprint": c.fingerprint,
        "reference": c.reference,
        "n_graphs": c.n_graphs,
        "epsilon_t25": at(25),
        "epsilon_final": c.at(t_max),
        "stderr_final": c.stderr[t_max - 1],
    })
}

/// Run `scenario`, writing its bundle under `out`.
pub fn run_scenario(
    scenario: Scenario,
    cfg: &ScenarioConfig,
    out: &Path,
    cache: &ReferenceCache,
    log: &mut dyn FnMut(&str),
) -> Result<ScenarioReport> {
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(Error::invalid(format!("unsupported config schema version {}", cfg.schema_version)));
    }
    cfg.training.validate()?;
    let dir = RunDir::create(out)?;
    dir.write_json("config.json", &json!({ "scenario": scenario, "config": cfg }))?;
    let mut ctx = Ctx { cfg, dir, cache, log, invariant_failures: Vec::new() };
    let (checks, summary) = match scenario {
        Scenario::ScaleSweep => scale_sweep(&mut ctx)?,
        Scenario::Stage => stage(&mut ctx)?,
        Scenario::Speedup => speedup(&mut ctx)?,
        Scenario::Survival => survival(&mut ctx)?,
        Scenario::Communities => communities(&mut ctx)?,
    };
    let report = ScenarioReport { scenario, checks, invariant_failures: ctx.invariant_failures, summary };
    ctx.dir.write_json("summary.json", &report)?;
    Ok(report)
}

fn scale_sweep(ctx: &mut Ctx<'_>) -> Result<(Vec<TrendCheck>, Value)> {
    if ctx.cfg.sizes.is_empty() {
        return Err(Error::invalid("scale sweep needs at least one size"));
    }
    let mut rows = Vec::new();
    let mut table = String::from("n,mode_alpha,mode_beta,mean_alpha,mean_beta,correlation,graphs,converged\n");
    for (i, &n) in ctx.cfg.sizes.iter().enumerate() {
        let tcfg = TrainingConfig { n, staged: false, ..ctx.cfg.training.clone() };
        let out = ctx.train(&format!("N{n}"), &tcfg, None, i as u64)?;
        let grid = out.model.flattened();
        let s = summarize(&grid);
        table.push_str(&crate::format::csv_line([
            n.to_string(),
            crate::format::sig9(s.mode_alpha),
            crate::format::sig9(s.mode_beta),
            crate::format::sig9(s.mean_alpha),
            crate::format::sig9(s.mean_beta),
            crate::format::sig9(s.correlation),
            out.graphs_used.to_string(),
            out.converged.to_string(),
        ]));
        rows.push((n, s, out.graphs_used, out.converged));
    }
    ctx.dir.write("scale_summary.csv", &table)?;

    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    let mut checks = vec![
        TrendCheck::new(
            "mean_alpha_grows_with_n",
            last.1.mean_alpha > first.1.mean_alpha,
            format!("mean alpha {} at N={} vs {} at N={}", last.1.mean_alpha, last.0, first.1.mean_alpha, first.0),
        ),
        TrendCheck::new(
            "mode_alpha_grows_with_n",
            last.1.mode_alpha > first.1.mode_alpha,
            format!("mode alpha {} at N={} vs {} at N={}", last.1.mode_alpha, last.0, first.1.mode_alpha, first.0),
        ),
    ];
    if let Some(big) = rows.iter().find(|r| r.0 >= 100) {
        checks.push(TrendCheck::new(
            "correlation_positive_at_large_n",
            big.1.correlation > first.1.correlation,
            format!("alpha-beta correlation {} at N={} vs {} at N={}", big.1.correlation, big.0, first.1.correlation, first.0),
        ));
    }
    let summary = json!({
        "sizes": rows.iter().map(|(n, s, g, c)| json!({
            "n": n, "mode_alpha": s.mode_alpha, "mode_beta": s.mode_beta, "mode_tied": s.mode_tied,
            "mean_alpha": s.mean_alpha, "mean_beta": s.mean_beta, "correlation": s.correlation,
            "graphs_trained": g, "converged": c,
        })).collect::<Vec<_>>(),
    });
    Ok((checks, summary))
}

fn stage(ctx: &mut Ctx<'_>) -> Result<(Vec<TrendCheck>, Value)> {
    let plain_cfg = TrainingConfig { staged: false, ..ctx.cfg.training.clone() };
    let plain = ctx.train("plain", &plain_cfg, None, 0)?;
    let staged_cfg = TrainingConfig { staged: true, ..ctx.cfg.training.clone() };
    let init = if ctx.cfg.stage_warm_start { staged_cfg.model_from(plain.model.flattened())? } else { staged_cfg.initial_model()? };
    let staged = ctx.train("staged", &staged_cfg, Some(init), 1)?;
    let Model::Staged(buckets) = &staged.model else { unreachable!("staged config yields a staged model") };
    let plain_grid = plain.model.flattened();
    let report = stage_analysis(buckets, &staged.contributors, &plain_grid)?;
    ctx.dir.write("stage_scatter.csv", &stage_scatter_csv(buckets, &staged.contributors)?)?;

    let eval = ctx.cfg.evaluation.clone();
    let c_staged = ctx.curve("staged", &staged.model, &eval)?;
    let c_plain = ctx.curve("plain", &plain.model, &eval)?;
    ctx.dir.write("error_curve.csv", &c_staged.to_csv())?;

    let early_t = 5.min(eval.colony.t_max);
    let checks = vec![
        TrendCheck::new("newly_proposed_beta_exceeds_late_beta", report.beta_decreases, format!("beta gap {}", report.beta_gap)),
        TrendCheck::new(
            "late_stage_below_mode",
            report.late_below_mode,
            format!("late mean beta vs plain mode beta {}", report.plain_mode_beta),
        ),
        TrendCheck::new("stage_union_close_to_plain", report.union_tv < 0.15, format!("total variation {}", report.union_tv)),
        TrendCheck::new(
            "staged_wins_early",
            c_staged.at(early_t) < c_plain.at(early_t),
            format!("epsilon({early_t}) staged {} vs plain {}", c_staged.at(early_t), c_plain.at(early_t)),
        ),
    ];
    let summary = json!({
        "stages": report,
        "plain_grid": grid_summary_json(&plain_grid),
        "curves": { "staged": curve_json(&c_staged), "plain": curve_json(&c_plain) },
    });
    Ok((checks, summary))
}

fn speedup(ctx: &mut Ctx<'_>) -> Result<(Vec<TrendCheck>, Value)> {
    let mut base = ctx.cfg.training.clone();
    base.staged = false;
    base.colony.speedup = false;
    let plain = ctx.train("plain", &base, None, 0)?;
    let mut with = base.clone();
    with.colony.speedup = true;
    let fast = ctx.train("speedup", &with, None, 1)?;

    let mut eval = ctx.cfg.evaluation.clone();
    eval.communities = 1;
    eval.colony.speedup = false;
    let c_plain = ctx.curve("plain", &plain.model, &eval)?;
    eval.colony.speedup = true;
    let c_fast = ctx.curve("plain_grid_speedup", &plain.model, &eval)?;
    let c_fast_trained = ctx.curve("speedup", &fast.model, &eval)?;
    ctx.dir.write("error_curve.csv", &c_fast.to_csv())?;

    let t_max = eval.colony.t_max;
    let (diff, se) = paired_difference(&c_plain.column(t_max), &c_fast.column(t_max));
    let (sp, sf) = (summarize(&plain.model.flattened()), summarize(&fast.model.flattened()));
    let checks = vec![
        TrendCheck::new("speedup_lowers_final_error", diff > 0.0, format!("paired mean difference {diff} (stderr {se})")),
        TrendCheck::new(
            "speedup_lowers_alpha_peak",
            sf.mode_alpha <= sp.mode_alpha,
            format!("mode alpha {} with vs {} without", sf.mode_alpha, sp.mode_alpha),
        ),
    ];
    let summary = json!({
        "grids": { "plain": grid_summary_json(&plain.model.flattened()), "speedup": grid_summary_json(&fast.model.flattened()) },
        "curves": { "plain": curve_json(&c_plain), "plain_grid_speedup": curve_json(&c_fast), "speedup": curve_json(&c_fast_trained) },
        "paired_final": { "mean_difference": diff, "stderr": se },
    });
    Ok((checks, summary))
}

fn survival(ctx: &mut Ctx<'_>) -> Result<(Vec<TrendCheck>, Value)> {
    let mut base = ctx.cfg.training.clone();
    base.staged = false;
    let normal = ctx.train("normal", &TrainingConfig { survival: SurvivalRule::None, ..base.clone() }, None, 0)?;
    let init = ctx.cfg.survival_warm_start.then(|| normal.model.clone());
    let early = ctx.train("early_only", &TrainingConfig { survival: SurvivalRule::EarlyOnly, ..base.clone() }, init.clone(), 1)?;
    let late = ctx.train("late_only", &TrainingConfig { survival: SurvivalRule::LateOnly, ..base.clone() }, init, 2)?;

    let improvement =
        improvement_vs_stage(&normal.contributors, &crate::StageBuckets::standard(base.colony.t_max, &ParamGrid::uniform())?.bounds());
    ctx.dir.write("improvement_vs_stage.csv", &improvement.to_csv())?;

    let mut eval = ctx.cfg.evaluation.clone();
    eval.communities = 1;
    let c_normal = ctx.curve("normal", &normal.model, &eval)?;
    let c_early = ctx.curve("early_only", &early.model, &eval)?;
    let c_late = ctx.curve("late_only", &late.model, &eval)?;
    let decay = EvalConfig {
        colony: crate::ColonyConfig {
            ant_decay: Some(AntDecay { after: base.survival_cutoff, ..AntDecay::default() }),
            ..eval.colony.clone()
        },
        ..eval.clone()
    };
    let c_decay = ctx.curve("early_only_decay", &early.model, &decay)?;
    ctx.dir.write(
        "error_curve.csv",
        &survival_table(&[("normal", &c_normal), ("early_only", &c_early), ("late_only", &c_late), ("early_only_decay", &c_decay)]),
    )?;

    let t_max = eval.colony.t_max;
    let t_short = 25.min(t_max);
    let checks = vec![
        TrendCheck::new(
            "early_only_wins_short_term",
            c_early.at(t_short) < c_normal.at(t_short),
            format!("epsilon({t_short}) early-only {} vs normal {}", c_early.at(t_short), c_normal.at(t_short)),
        ),
        TrendCheck::new(
            "early_only_loses_long_term",
            c_early.at(t_max) > c_normal.at(t_max),
            format!("epsilon({t_max}) early-only {} vs normal {}", c_early.at(t_max), c_normal.at(t_max)),
        ),
        TrendCheck::new(
            "decay_worse_than_normal",
            c_decay.at(t_max) > c_normal.at(t_max),
            format!("epsilon({t_max}) decaying {} vs normal {}", c_decay.at(t_max), c_normal.at(t_max)),
        ),
        TrendCheck::new(
            "improvement_falls_with_stage",
            improvement.non_increasing,
            format!("{:?}", improvement.stages.iter().map(|s| s.mean_improvement).collect::<Vec<_>>()),
        ),
    ];
    let summary = json!({
        "grids": {
            "normal": grid_summary_json(&normal.model.flattened()),
            "early_only": grid_summary_json(&early.model.flattened()),
            "late_only": grid_summary_json(&late.model.flattened()),
        },
        "curves": {
            "normal": curve_json(&c_normal), "early_only": curve_json(&c_early),
            "late_only": curve_json(&c_late), "early_only_decay": curve_json(&c_decay),
        },
        "improvement_by_stage": improvement,
    });
    Ok((checks, summary))
}

/// Side-by-side curves: t, then epsilon_mean and epsilon_stderr per label.
fn survival_table(curves: &[(&str, &ErrorCurve)]) -> String {
    use crate::format::{csv_line, sig9};
    let mut header = vec!["t".to_string()];
    for (label, _) in curves {
        header.push(format!("epsilon_mean_{label}"));
        header.push(format!("epsilon_stderr_{label}"));
    }
    let mut out = csv_line(header);
    let t_max = curves.iter().map(|(_, c)| c.epsilon.len()).min().unwrap_or(0);
    for t in 0..t_max {
        let mut row = vec![(t + 1).to_string()];
        for (_, c) in curves {
            row.push(sig9(c.epsilon[t]));
            row.push(sig9(c.stderr[t]));
        }
        out.push_str(&csv_line(row));
    }
    out
}

fn communities(ctx: &mut Ctx<'_>) -> Result<(Vec<TrendCheck>, Value)> {
    let k = ctx.cfg.communities.max(1);
    let base = TrainingConfig { staged: false, ..ctx.cfg.training.clone() };
    let trained = ctx.train("plain", &base, None, 0)?;
    let eval = EvalConfig { communities: k, ..ctx.cfg.evaluation.clone() };
    let seed = rng::derive_seed(ctx.cfg.seed, &[tag::EVAL]);
    (ctx.log)(&format!("[communities] evaluating k=1..{k} on {} graphs", eval.n_graphs));
    let curves = community_curves(&trained.model, &eval, seed, ctx.cache)?;
    for (i, c) in curves.iter().enumerate() {
        ctx.check_curve(&format!("k{}", i + 1), c);
        ctx.dir.write(&format!("error_curve_k{}.csv", i + 1), &c.to_csv())?;
    }
    ctx.dir.write("error_curve.csv", &curves[k - 1].to_csv())?;
    let t_max = eval.colony.t_max;
    let (diff, se) = paired_difference(&curves[0].column(t_max), &curves[k - 1].column(t_max));
    let separation = if se > 0.0 {
        diff / se
    } else if diff > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let checks = vec![TrendCheck::new(
        "communities_reduce_error",
        k > 1 && separation >= 2.0,
        format!("paired reduction {diff} with stderr {se} ({separation} standard errors)"),
    )];
    let summary = json!({
        "grid": grid_summary_json(&trained.model.flattened()),
        "curves": curves.iter().map(curve_json).collect::<Vec<_>>(),
        "paired_final": { "mean_reduction": diff, "stderr": se },
    });
    Ok((checks, summary))
}

/// Grid of a staged model's bucket, for callers that only hold the model.
pub fn stage_grid(model: &Model, bucket: usize) -> Option<&ParamGrid> {
    match model {
        Model::Staged(s) => s.grids().get(bucket),
        Model::Plain(_) => None,
    }
}
