use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Model;
use crate::aco::{run_colony, ColonyConfig};
use crate::error::{Error, Result};
use crate::format::{csv_line, sig9};
use crate::rng::{self, tag};
use crate::tsp::{reference_method, Instance, ReferenceCache, ReferenceMethod, RegionSpec, DEFAULT_RESTARTS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub n: usize,
    pub region: RegionSpec,
    pub n_graphs: usize,
    pub communities: usize,
    pub colony: ColonyConfig,
    pub reference_restarts: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n: 100,
            region: RegionSpec::unit_square(),
            n_graphs: 50,
            communities: 1,
            colony: ColonyConfig::default(),
            reference_restarts: DEFAULT_RESTARTS,
        }
    }
}

/// Mean relative error `L(t)/L_ref - 1` over a set of graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub epsilon: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_graphs: usize,
    pub communities: usize,
    pub reference: ReferenceMethod,
    pub fingerprint: String,
    /// `per_graph[g][t - 1]`.
    #[serde(skip)]
    pub per_graph: Vec<Vec<f64>>,
}

impl ErrorCurve {
    fn from_per_graph(per_graph: Vec<Vec<f64>>, communities: usize, reference: ReferenceMethod, fingerprint: String) -> Self {
        let g = per_graph.len();
        let t_max = per_graph.first().map_or(0, Vec::len);
        let mut epsilon = vec![0.0; t_max];
        let mut stderr = vec![0.0; t_max];
        for t in 0..t_max {
            let column: Vec<f64> = per_graph.iter().map(|c| c[t]).collect();
            let (m, se) = mean_stderr(&column);
            epsilon[t] = m;
            stderr[t] = se;
        }
        Self { epsilon, stderr, n_graphs: g, communities, reference, fingerprint, per_graph }
    }

    /// Mean error at iteration `t` (1-based).
    pub fn at(&self, t: usize) -> f64 {
        self.epsilon[t - 1]
    }

    /// Per-graph errors at iteration `t`.
    pub fn column(&self, t: usize) -> Vec<f64> {
        self.per_graph.iter().map(|c| c[t - 1]).collect()
    }

    /// CSV: t, epsilon_mean, epsilon_stderr.
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(["t", "epsilon_mean", "epsilon_stderr"]);
        for (t, (e, s)) in self.epsilon.iter().zip(&self.stderr).enumerate() {
            out.push_str(&csv_line([(t + 1).to_string(), sig9(*e), sig9(*s)]));
        }
        out
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Paired comparison of `a - b`: mean difference and its standard error.
pub fn paired_difference(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    mean_stderr(&d)
}

/// Evaluation graph `g` of a seed; shared by every model evaluated with that seed.
pub fn eval_instance(cfg: &EvalConfig, seed: u64, graph: usize) -> Result<Instance> {
    Instance::generate(cfg.n, cfg.region, rng::derive_seed(seed, &[tag::EVAL, graph as u64]))
}

/// Error curves for 1, 2, ..., `cfg.communities` independent communities on
/// the same graphs; entry `k - 1` keeps, at every `t`, the best of the first
/// `k` communities.
pub fn community_curves(model: &Model, cfg: &EvalConfig, seed: u64, cache: &ReferenceCache) -> Result<Vec<ErrorCurve>> {
    if cfg.n_graphs < 1 || cfg.communities < 1 {
        return Err(Error::invalid("need at least one graph and one community"));
    }
    cfg.colony.validate()?;
    let per_graph: Vec<Vec<Vec<f64>>> = (0..cfg.n_graphs)
        .into_par_iter()
        .map(|g| -> Result<Vec<Vec<f64>>> {
            let inst = eval_instance(cfg, seed, g)?;
            let reference = cache.get_or_compute(&inst, cfg.reference_restarts)?;
            let mut running = vec![f64::INFINITY; cfg.colony.t_max];
            let mut out = Vec::with_capacity(cfg.communities);
            for c in 0..cfg.communities {
                let run_seed = rng::derive_seed(seed, &[tag::EVAL, g as u64, c as u64 + 1]);
                let trace = model.with_source(|src| run_colony(&inst, src, &cfg.colony, run_seed))?;
                for (r, b) in running.iter_mut().zip(trace.best_known_curve()) {
                    *r = r.min(b);
                }
                out.push(running.iter().map(|l| l / reference - 1.0).collect());
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let method = reference_method(cfg.n);
    Ok((0..cfg.communities)
        .map(|k| {
            let curves = per_graph.iter().map(|g| g[k].clone()).collect();
            ErrorCurve::from_per_graph(curves, k + 1, method, fingerprint(model, cfg, seed, k + 1))
        })
        .collect())
}

/// Error curve for `cfg.communities` communities.
pub fn error_curve(model: &Model, cfg: &EvalConfig, seed: u64, cache: &ReferenceCache) -> Result<ErrorCurve> {
    Ok(community_curves(model, cfg, seed, cache)?.pop().expect("at least one community"))
}

fn fingerprint(model: &Model, cfg: &EvalConfig, seed: u64, communities: usize) -> String {
    let kind = match model {
        Model::Plain(_) => "plain",
        Model::Staged(_) => "staged",
    };
    format!(
        "n={} graphs={} communities={} t_max={} speedup={} decay={} model={} seed={}",
        cfg.n,
        cfg.n_graphs,
        communities,
        cfg.colony.t_max,
        cfg.colony.speedup,
        cfg.colony.ant_decay.is_some(),
        kind,
        seed
    )
}
