use std::path::Path;

use anyhow::Context;
use colony_core::aco::run_colony;
use colony_core::experiments::{train_population, Model, Scenario, ScenarioConfig};
use colony_core::population::{GridFile, GridMeta, ParamGrid};
use colony_core::rng::{self, tag};
use colony_core::tsp::{reference_optimum, Instance, InstanceFile, ReferenceCache};
use serde::Serialize;
use serde_json::json;

use crate::config::{self, Cli, Command, ConfigError, ExperimentArgs, SolveArgs, TrainArgs};
use crate::exit;

pub fn run(cli: Cli) -> anyhow::Result<u8> {
    if let Some(n) = config::resolve_threads(cli.threads)? {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
    }
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::Train(a) => train(a),
        Command::Experiment(a) => experiment(a),
    }
}

pub fn exit_code_for(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return exit::USAGE;
    }
    match e.downcast_ref::<colony_core::Error>() {
        Some(colony_core::Error::Io(_)) | Some(colony_core::Error::Json(_)) | None => exit::FAILURE,
        Some(_) => exit::INVALID_ARGUMENT,
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(dir, name, &text)
}

fn write(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())).into())
}

fn solve(a: SolveArgs) -> anyhow::Result<u8> {
    let mut cfg = config::load(a.common.config.as_deref())?;
    config::apply_common(&mut cfg, &a.common)?;
    let colony = cfg.evaluation.colony.clone();
    colony.validate()?;

    let inst = match &a.instance {
        Some(path) => Instance::from_file(read_json::<InstanceFile>(path)?)?,
        None => Instance::generate(cfg.evaluation.n, cfg.evaluation.region, rng::derive_seed(cfg.seed, &[tag::INSTANCE]))?,
    };
    let grid = match &a.grid {
        Some(path) => ParamGrid::from_file(&read_json::<GridFile>(path)?)?,
        None => ParamGrid::uniform(),
    };

    let out = &a.common.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(out, "config.json", &json!({ "command": "solve", "grid": a.grid, "instance": a.instance, "config": cfg }))?;
    write_json(out, "instance.json", &inst.to_file())?;

    let seed = rng::derive_seed(cfg.seed, &[tag::COLONY]);
    let trace = run_colony(&inst, &grid.sampler(), &colony, seed)?;
    write(out, "trace.csv", &trace.summary_csv())?;
    write(out, "contributors.csv", &trace.contributors_csv())?;

    let best = &trace.best_tour;
    let mut summary = json!({
        "n": inst.n(),
        "t_max": colony.t_max,
        "best_length": best.length(),
        "order": best.order(),
    });
    if a.reference {
        let opt = reference_optimum(&inst, cfg.evaluation.reference_restarts)?;
        summary["reference_length"] = json!(opt);
        summary["relative_error"] = json!(best.length() / opt - 1.0);
    }
    write_json(out, "best_tour.json", &summary)?;
    println!("best length {:.9} after {} iterations", best.length(), colony.t_max);
    Ok(exit::OK)
}

fn train(a: TrainArgs) -> anyhow::Result<u8> {
    let mut cfg = config::load(a.common.config.as_deref())?;
    config::apply_common(&mut cfg, &a.common)?;
    if a.staged {
        cfg.training.staged = true;
    }
    if let Some(s) = &a.survival {
        cfg.training.survival = config::parse_survival(s)?;
    }
    if let Some(m) = a.max_graphs {
        cfg.training.max_graphs = m;
    }
    cfg.training.validate()?;

    let out = &a.common.out;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(out, "config.json", &json!({ "command": "train", "config": cfg }))?;

    let seed = rng::derive_seed(cfg.seed, &[tag::TRAIN]);
    let mut progress = |g: &colony_core::experiments::GraphLog| {
        if (g.graph + 1).is_multiple_of(10) {
            eprintln!("graph {} contributors {} best {:.6}", g.graph + 1, g.n_contributors, g.best_length);
        }
    };
    let outcome = train_population(&cfg.training, seed, &mut progress)?;
    let meta = GridMeta {
        graphs_trained: outcome.graphs_used,
        pool: cfg.training.pool,
        schedule: format!("{:?}", cfg.training.colony.p_schedule),
    };
    let mut failures = Vec::new();
    match &outcome.model {
        Model::Plain(g) => {
            check_grid(g, "grid", &mut failures);
            write_json(out, "grid.json", &g.to_file(meta))?;
            write(out, "grid.csv", &g.weights_csv())?;
        }
        Model::Staged(s) => {
            for (b, g) in s.grids().iter().enumerate() {
                check_grid(g, &format!("stage {}", b + 1), &mut failures);
                write_json(out, &format!("grid_stage{}.json", b + 1), &g.to_file(meta.clone()))?;
                write(out, &format!("grid_stage{}.csv", b + 1), &g.weights_csv())?;
            }
        }
    }
    write(out, "contributors.csv", &colony_core::aco::contributors_csv(&outcome.contributors))?;
    let summary = colony_core::population::summarize(&outcome.model.flattened());
    write_json(
        out,
        "summary.json",
        &json!({
            "graphs_used": outcome.graphs_used,
            "converged": outcome.converged,
            "mode_alpha": summary.mode_alpha,
            "mode_beta": summary.mode_beta,
            "mean_alpha": summary.mean_alpha,
            "mean_beta": summary.mean_beta,
            "correlation": summary.correlation,
            "invariant_failures": failures,
        }),
    )?;
    eprintln!("trained on {} graphs, converged={}", outcome.graphs_used, outcome.converged);
    report_failures(&failures)
}

fn check_grid(g: &ParamGrid, label: &str, failures: &mut Vec<String>) {
    let sum: f64 = g.weights().iter().sum();
    if (sum - 1.0).abs() > 1e-9 || g.weights().iter().any(|w| *w < 0.0) {
        failures.push(format!("{label} is not a normalized distribution (sum {sum})"));
    }
}

fn report_failures(failures: &[String]) -> anyhow::Result<u8> {
    for f in failures {
        eprintln!("invariant failed: {f}");
    }
    Ok(if failures.is_empty() { exit::OK } else { exit::INVARIANT })
}

fn experiment(a: ExperimentArgs) -> anyhow::Result<u8> {
    let scenario: Scenario = a.scenario.parse().map_err(|e: colony_core::Error| ConfigError(e.to_string()))?;
    let mut cfg: ScenarioConfig = config::load(a.common.config.as_deref())?;
    config::apply_common(&mut cfg, &a.common)?;
    if let Some(s) = a.sizes {
        cfg.sizes = s;
    }
    if let Some(k) = a.k {
        cfg.communities = k;
    }
    if a.full {
        cfg.evaluation.n_graphs = 500;
    }
    if let Some(g) = a.graphs {
        cfg.evaluation.n_graphs = g;
    }
    if let Some(t) = a.eval_t_max {
        cfg.evaluation.colony.t_max = t;
    }
    if let Some(m) = a.max_graphs {
        cfg.training.max_graphs = m;
    }

    let cache = match &a.reference_cache {
        Some(p) => ReferenceCache::open(p)?,
        None => ReferenceCache::in_memory(),
    };
    let report = colony_core::experiments::run_scenario(scenario, &cfg, &a.common.out, &cache, &mut |line| eprintln!("{line}"))?;
    if a.reference_cache.is_some() {
        cache.save()?;
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    report_failures(&report.invariant_failures)
}
