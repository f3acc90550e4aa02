use crate::error::{Error, Result};
use crate::tsp::{Instance, Tour};

/// Symmetric per-edge pheromone amounts.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneField {
    n: usize,
    tau: Vec<f64>,
}

impl PheromoneField {
    pub fn zeros(n: usize) -> Self {
        Self { n, tau: vec![0.0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    /// Set the undirected edge `i-j`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i == j || !(value >= 0.0) || !value.is_finite() {
            return Err(Error::invalid(format!("cannot set tau[{i}][{j}] = {value}")));
        }
        self.tau[i * self.n + j] = value;
        self.tau[j * self.n + i] = value;
        Ok(())
    }

    #[inline]
    fn add(&mut self, i: usize, j: usize, amount: f64) {
        self.tau[i * self.n + j] += amount;
        self.tau[j * self.n + i] += amount;
    }

    pub(crate) fn raw(&self) -> &[f64] {
        &self.tau
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Multiply every edge by `1 - p/100`.
    pub fn evaporate(&mut self, p: f64) -> Result<()> {
        if !(p > 0.0 && p <= 100.0) {
            return Err(Error::invalid(format!("evaporation percentage {p} outside (0, 100]")));
        }
        let keep = 1.0 - p / 100.0;
        self.tau.iter_mut().for_each(|t| *t *= keep);
        Ok(())
    }

    /// Rank-weighted deposit along each winner's tour. `winners` must be
    /// sorted by ascending length.
    ///
    /// The winner at rank `r` of `k` deposits `w_r / L` per edge with linear
    /// weights `w_r = 2(k + 1 - r) / (k(k + 1))`, scaled down by
    /// `min(1, (L/N) / d)` on edges longer than the tour's mean step.
    pub fn deposit(&mut self, inst: &Instance, winners: &[&Tour]) -> Result<()> {
        if winners.is_empty() {
            return Err(Error::invalid("deposit needs at least one winner"));
        }
        let k = winners.len();
        let n = inst.n() as f64;
        for (idx, tour) in winners.iter().enumerate() {
            let w = rank_weight(idx + 1, k);
            let len = tour.length();
            let mean_step = len / n;
            let base = w / len;
            for (a, b) in tour.edges() {
                let d = inst.dist(a, b);
                self.add(a, b, base * long_step_penalty(d, mean_step));
            }
        }
        Ok(())
    }
}

/// Linear rank weight of rank `r` (1-based) among `k`; the weights sum to 1.
pub fn rank_weight(r: usize, k: usize) -> f64 {
    2.0 * (k + 1 - r) as f64 / (k * (k + 1)) as f64
}

#[inline]
pub fn long_step_penalty(d: f64, mean_step: f64) -> f64 {
    if d <= mean_step {
        1.0
    } else {
        mean_step / d
    }
}

/// Indices of the `max(1, round(p% of ants))` shortest tours, shortest first,
/// ties by ant index.
pub fn select_winners(lengths: &[f64], p: f64) -> Vec<usize> {
    if lengths.is_empty() {
        return Vec::new();
    }
    let k = ((p / 100.0 * lengths.len() as f64).round() as usize).clamp(1, lengths.len());
    let mut idx: Vec<usize> = (0..lengths.len()).collect();
    idx.sort_by(|&a, &b| lengths[a].total_cmp(&lengths[b]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}
