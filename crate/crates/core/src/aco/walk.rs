//! Biased self-avoiding walks.
//!
//! Transition weights `(b + tau_cj)^alpha / d_cj^beta` are evaluated in log
//! space as `alpha * ln(b + tau) - beta * ln(d)` and shifted by their maximum
//! before exponentiation, which is the same as dividing every weight by the
//! largest one: nothing overflows and the best candidate always has weight 1.

use rand::Rng;

use super::{AntParams, PheromoneField};
use crate::error::{Error, Result};
use crate::tsp::{Instance, Tour};

/// Log-distance table, fixed for an instance.
#[derive(Debug, Clone)]
pub struct LogDistances {
    n: usize,
    ln_d: Vec<f64>,
}

impl LogDistances {
    pub fn new(inst: &Instance) -> Self {
        let n = inst.n();
        let mut ln_d = vec![0.0; n * n];
        for i in 0..n {
            for (j, &d) in inst.row(i).iter().enumerate() {
                if i != j {
                    ln_d[i * n + j] = d.ln();
                }
            }
        }
        Self { n, ln_d }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.ln_d[i * self.n..(i + 1) * self.n]
    }
}

/// `ln(background + tau)`, recomputed whenever the field changes.
#[derive(Debug, Clone)]
pub struct LogTrail {
    n: usize,
    ln_t: Vec<f64>,
}

impl LogTrail {
    pub fn new(field: &PheromoneField, background: f64) -> Self {
        let ln_t = field.raw().iter().map(|&t| (background + t).ln()).collect();
        Self { n: field.n(), ln_t }
    }

    #[inline]
    fn row(&self, i: usize) -> &[f64] {
        &self.ln_t[i * self.n..(i + 1) * self.n]
    }
}

/// Read-only view an ant walks on.
pub struct WalkContext<'a> {
    pub inst: &'a Instance,
    pub ln_dist: &'a LogDistances,
    pub ln_trail: &'a LogTrail,
}

/// Unnormalized, max-rescaled weights of `candidates` seen from `current`.
/// Returns their sum.
#[inline]
fn fill_weights(ctx: &WalkContext<'_>, current: usize, candidates: &[usize], params: AntParams, out: &mut Vec<f64>) -> f64 {
    let lt = ctx.ln_trail.row(current);
    let ld = ctx.ln_dist.row(current);
    out.clear();
    let mut max = f64::NEG_INFINITY;
    for &j in candidates {
        let lw = params.alpha * lt[j] - params.beta * ld[j];
        max = max.max(lw);
        out.push(lw);
    }
    let mut sum = 0.0;
    for w in out.iter_mut() {
        *w = (*w - max).exp();
        sum += *w;
    }
    if !(sum > 0.0 && sum.is_finite()) {
        out.iter_mut().for_each(|w| *w = 1.0);
        sum = out.len() as f64;
    }
    sum
}

/// Probability of stepping from `current` to each vertex; visited vertices
/// get exactly 0.
pub fn transition_probabilities(
    inst: &Instance,
    field: &PheromoneField,
    background: f64,
    current: usize,
    visited: &[bool],
    params: AntParams,
) -> Result<Vec<f64>> {
    let n = inst.n();
    if visited.len() != n || field.n() != n || current >= n {
        return Err(Error::InvalidState("mismatched instance, field, or visited set".into()));
    }
    let candidates: Vec<usize> = (0..n).filter(|&j| j != current && !visited[j]).collect();
    if candidates.is_empty() {
        return Err(Error::InvalidState("no unvisited vertex to move to".into()));
    }
    let ln_dist = LogDistances::new(inst);
    let ln_trail = LogTrail::new(field, background);
    let ctx = WalkContext { inst, ln_dist: &ln_dist, ln_trail: &ln_trail };
    let mut weights = Vec::with_capacity(candidates.len());
    let sum = fill_weights(&ctx, current, &candidates, params, &mut weights);
    let mut probs = vec![0.0; n];
    for (&j, &w) in candidates.iter().zip(&weights) {
        probs[j] = w / sum;
    }
    Ok(probs)
}

/// One ant's tour: uniform random start, then weighted steps to unvisited
/// vertices until the cycle closes.
pub fn ant_walk<R: Rng>(ctx: &WalkContext<'_>, params: AntParams, rng: &mut R) -> Tour {
    let n = ctx.inst.n();
    let start = rng.random_range(0..n);
    // candidates kept in ascending index order so sampling is a plain cumulative scan
    let mut remaining: Vec<usize> = (0..n).filter(|&v| v != start).collect();
    let mut order = Vec::with_capacity(n);
    order.push(start);
    let mut weights = Vec::with_capacity(n);
    let mut current = start;
    while !remaining.is_empty() {
        let sum = fill_weights(ctx, current, &remaining, params, &mut weights);
        let mut target = rng.random::<f64>() * sum;
        let mut pick = remaining.len() - 1;
        for (k, &w) in weights.iter().enumerate() {
            if target < w {
                pick = k;
                break;
            }
            target -= w;
        }
        current = remaining.remove(pick);
        order.push(current);
    }
    Tour::from_order_unchecked(ctx.inst, order)
}
