use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::two_opt::two_opt;
use super::walk::{ant_walk, LogDistances, LogTrail, WalkContext};
use super::{select_winners, AntParams, ColonyConfig, PheromoneField};
use crate::error::Result;
use crate::format::{csv_line, sig9};
use crate::rng::{self, StreamRng};
use crate::tsp::{Instance, Tour};

/// Supplies the heuristic parameters of the ants sampled at iteration `t`.
pub trait ParamSource: Sync {
    fn sample_params(&self, t: usize, count: usize, rng: &mut StreamRng) -> Vec<AntParams>;
}

/// Every ant shares the same parameters.
#[derive(Debug, Clone, Copy)]
pub struct FixedParams(pub AntParams);

impl ParamSource for FixedParams {
    fn sample_params(&self, _t: usize, count: usize, _rng: &mut StreamRng) -> Vec<AntParams> {
        vec![self.0; count]
    }
}

/// An ant that beat the best-known length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub t: usize,
    pub params: AntParams,
    pub length: f64,
    /// `(best_known_before - length) / best_known_before`; 0 at t = 1.
    pub improvement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub lengths: Vec<f64>,
    /// Best length entering the iteration; infinite at t = 1.
    pub best_known_before: f64,
    pub contributors: Vec<Contribution>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub iterations: Vec<IterationRecord>,
    pub best_tour: Tour,
}

impl RunTrace {
    /// Best-known length after each iteration.
    pub fn best_known_curve(&self) -> Vec<f64> {
        self.iterations
            .iter()
            .scan(f64::INFINITY, |best, it| {
                *best = it.lengths.iter().copied().fold(*best, f64::min);
                Some(*best)
            })
            .collect()
    }

    pub fn contributors(&self) -> impl Iterator<Item = &Contribution> + '_ {
        self.iterations.iter().flat_map(|it| it.contributors.iter())
    }

    /// CSV: t, best_known, n_contributors, mean_alpha_contrib, mean_beta_contrib.
    /// Means are left empty when an iteration has no contributors.
    pub fn summary_csv(&self) -> String {
        let mut out = csv_line(["t", "best_known", "n_contributors", "mean_alpha_contrib", "mean_beta_contrib"]);
        for (it, best) in self.iterations.iter().zip(self.best_known_curve()) {
            let k = it.contributors.len();
            let (ma, mb) = if k == 0 {
                (String::new(), String::new())
            } else {
                let sa: f64 = it.contributors.iter().map(|c| c.params.alpha).sum();
                let sb: f64 = it.contributors.iter().map(|c| c.params.beta).sum();
                (sig9(sa / k as f64), sig9(sb / k as f64))
            };
            out.push_str(&csv_line([it.t.to_string(), sig9(best), k.to_string(), ma, mb]));
        }
        out
    }

    /// CSV: t, alpha, beta, improvement_fraction.
    pub fn contributors_csv(&self) -> String {
        contributors_csv(self.contributors())
    }
}

pub fn contributors_csv<'a>(records: impl IntoIterator<Item = &'a Contribution>) -> String {
    let mut out = csv_line(["t", "alpha", "beta", "improvement_fraction"]);
    for c in records {
        out.push_str(&csv_line([c.t.to_string(), sig9(c.params.alpha), sig9(c.params.beta), sig9(c.improvement)]));
    }
    out
}

/// Run the colony on one instance for `cfg.t_max` iterations.
///
/// Ants of one iteration walk on a frozen pheromone snapshot and each draws
/// from its own stream keyed by `(seed, t, ant)`, so the trace does not
/// depend on the thread count.
pub fn run_colony(inst: &Instance, source: &dyn ParamSource, cfg: &ColonyConfig, seed: u64) -> Result<RunTrace> {
    cfg.validate()?;
    let n = inst.n();
    let ln_dist = LogDistances::new(inst);
    let mut field = PheromoneField::zeros(n);
    let mut best_known = f64::INFINITY;
    let mut best_tour: Option<Tour> = None;
    let mut iterations = Vec::with_capacity(cfg.t_max);

    for t in 1..=cfg.t_max {
        let n_ants = cfg.n_ants(t);
        let params = source.sample_params(t, n_ants, &mut rng::stream(seed, &[rng::tag::PARAMS, t as u64]));
        let ln_trail = LogTrail::new(&field, cfg.background);
        let ctx = WalkContext { inst, ln_dist: &ln_dist, ln_trail: &ln_trail };
        let tours: Vec<Tour> = params
            .par_iter()
            .enumerate()
            .map(|(ant, &p)| {
                let mut rng = rng::stream(seed, &[rng::tag::ANT, t as u64, ant as u64]);
                let tour = ant_walk(&ctx, p, &mut rng);
                if cfg.speedup {
                    two_opt(inst, &tour)
                } else {
                    tour
                }
            })
            .collect();
        let lengths: Vec<f64> = tours.iter().map(Tour::length).collect();

        let best_known_before = best_known;
        let contributors = if t == 1 {
            let winner = select_winners(&lengths, 0.0)[0];
            vec![Contribution { t, params: params[winner], length: lengths[winner], improvement: 0.0 }]
        } else {
            lengths
                .iter()
                .zip(&params)
                .filter(|(&l, _)| l < best_known_before)
                .map(|(&l, &p)| Contribution { t, params: p, length: l, improvement: (best_known_before - l) / best_known_before })
                .collect()
        };

        let winners = select_winners(&lengths, cfg.p_schedule.percent(t)?);
        if lengths[winners[0]] < best_known {
            best_known = lengths[winners[0]];
            best_tour = Some(tours[winners[0]].clone());
        }
        let ranked: Vec<&Tour> = winners.iter().map(|&i| &tours[i]).collect();
        field.deposit(inst, &ranked)?;
        field.evaporate(cfg.p_schedule.percent(t)?)?;

        iterations.push(IterationRecord { t, lengths, best_known_before, contributors });
    }

    Ok(RunTrace { iterations, best_tour: best_tour.expect("at least one iteration ran") })
}
