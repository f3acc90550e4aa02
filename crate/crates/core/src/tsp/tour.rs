use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Instance;
use crate::error::{Error, Result};

/// A Hamiltonian cycle through every vertex, with its cached length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    order: Vec<usize>,
    length: f64,
}

impl Tour {
    /// Validate `order` as a permutation of the instance's vertices.
    pub fn new(inst: &Instance, order: Vec<usize>) -> Result<Self> {
        let length = tour_length(inst, &order)?;
        Ok(Self { order, length })
    }

    /// Construct without validation; `order` must already be a permutation.
    pub(crate) fn from_order_unchecked(inst: &Instance, order: Vec<usize>) -> Self {
        debug_assert!(is_permutation(&order, inst.n()));
        let length = cycle_length(inst, &order);
        Self { order, length }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    /// Iterator over the undirected edges of the cycle, closing edge included.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| (self.order[k], self.order[(k + 1) % n]))
    }

    /// A uniformly random tour.
    pub fn random<R: Rng>(inst: &Instance, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..inst.n()).collect();
        order.shuffle(rng);
        Self::from_order_unchecked(inst, order)
    }
}

pub fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    true
}

/// Length of the closed cycle visiting `order`.
pub fn tour_length(inst: &Instance, order: &[usize]) -> Result<f64> {
    if !is_permutation(order, inst.n()) {
        return Err(Error::InvalidTour(format!("expected a permutation of 0..{}, got {} entries", inst.n(), order.len())));
    }
    Ok(cycle_length(inst, order))
}

pub(crate) fn cycle_length(inst: &Instance, order: &[usize]) -> f64 {
    let n = order.len();
    let mut total = 0.0;
    for k in 0..n - 1 {
        total += inst.dist(order[k], order[k + 1]);
    }
    total + inst.dist(order[n - 1], order[0])
}

/// Greedy tour from `start`: always step to the closest unvisited vertex,
/// ties going to the lowest index.
pub fn nearest_neighbor_tour(inst: &Instance, start: usize) -> Result<Tour> {
    let n = inst.n();
    if start >= n {
        return Err(Error::invalid(format!("start vertex {start} out of range 0..{n}")));
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut current = start;
    visited[current] = true;
    order.push(current);
    while order.len() < n {
        let row = inst.row(current);
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, &d) in row.iter().enumerate() {
            if !visited[j] && d < best_d {
                best = j;
                best_d = d;
            }
        }
        visited[best] = true;
        order.push(best);
        current = best;
    }
    Ok(Tour::from_order_unchecked(inst, order))
}
