use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::aco::{AntParams, Contribution, ParamSource};
use crate::error::{Error, Result};
use crate::format::{csv_line, sig9};
use crate::rng::StreamRng;

/// Default pool size: the notional population the ants are drawn from.
pub const DEFAULT_POOL: usize = 4000;

/// Evenly spaced parameter axis `min, min + step, ..., max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub step: f64,
    pub len: usize,
}

impl Default for Axis {
    fn default() -> Self {
        Self { min: 0.0, step: 0.1, len: 51 }
    }
}

impl Axis {
    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        // integer multiple, then divide, keeps 0.1-step values exact to the last ulp
        if self.step == 0.1 {
            self.min + i as f64 / 10.0
        } else {
            self.min + i as f64 * self.step
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    /// Index of the nearest axis value; exact midpoints go to the lower index.
    pub fn snap(&self, x: f64) -> usize {
        let pos = (x - self.min) / self.step;
        if !(pos > 0.0) {
            return 0;
        }
        let lower = pos.floor();
        // midpoints within rounding noise count as ties
        let idx = if pos - lower > 0.5 + 1e-9 { lower + 1.0 } else { lower };
        (idx as usize).min(self.len - 1)
    }
}

/// Discrete distribution over an alpha x beta grid, row-major in alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    alpha: Axis,
    beta: Axis,
    weights: Vec<f64>,
}

/// On-disk form of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub alpha_axis: Vec<f64>,
    pub beta_axis: Vec<f64>,
    pub weights: Vec<f64>,
    pub meta: GridMeta,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridMeta {
    pub graphs_trained: usize,
    #[serde(rename = "M")]
    pub pool: usize,
    pub schedule: String,
}

impl ParamGrid {
    /// Equal weight on every cell of the default 51 x 51 grid.
    pub fn uniform() -> Self {
        Self::uniform_on(Axis::default(), Axis::default())
    }

    pub fn uniform_on(alpha: Axis, beta: Axis) -> Self {
        let cells = alpha.len * beta.len;
        Self { alpha, beta, weights: vec![1.0 / cells as f64; cells] }
    }

    /// Grid with the given weights, renormalized.
    pub fn from_weights(alpha: Axis, beta: Axis, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != alpha.len * beta.len {
            return Err(Error::invalid(format!("expected {} weights, got {}", alpha.len * beta.len, weights.len())));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        let mut grid = Self { alpha, beta, weights };
        grid.normalize()?;
        Ok(grid)
    }

    pub fn point_mass(alpha: Axis, beta: Axis, a: usize, b: usize) -> Self {
        let mut weights = vec![0.0; alpha.len * beta.len];
        weights[a * beta.len + b] = 1.0;
        Self { alpha, beta, weights }
    }

    fn normalize(&mut self) -> Result<()> {
        let sum: f64 = self.weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::invalid("grid has no mass"));
        }
        self.weights.iter_mut().for_each(|w| *w /= sum);
        Ok(())
    }

    pub fn alpha_axis(&self) -> Axis {
        self.alpha
    }

    pub fn beta_axis(&self) -> Axis {
        self.beta
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.weights[a * self.beta.len + b]
    }

    /// `(alpha index, beta index)` of a flat cell index.
    #[inline]
    pub fn cell(&self, flat: usize) -> (usize, usize) {
        (flat / self.beta.len, flat % self.beta.len)
    }

    pub fn cell_params(&self, flat: usize) -> AntParams {
        let (a, b) = self.cell(flat);
        AntParams::new(self.alpha.value(a), self.beta.value(b))
    }

    /// Flat index of the cell nearest to `params`.
    pub fn snap(&self, params: AntParams) -> usize {
        self.alpha.snap(params.alpha) * self.beta.len + self.beta.snap(params.beta)
    }

    fn same_axes(&self, other: &ParamGrid) -> bool {
        self.alpha == other.alpha && self.beta == other.beta
    }

    /// Mass `1/n` per contribution at its snapped cell.
    pub fn empirical(&self, contributors: &[Contribution]) -> Result<ParamGrid> {
        if contributors.is_empty() {
            return Err(Error::invalid("empirical distribution of an empty contributor list"));
        }
        let mut weights = vec![0.0; self.weights.len()];
        let mass = 1.0 / contributors.len() as f64;
        for c in contributors {
            weights[self.snap(c.params)] += mass;
        }
        Ok(ParamGrid { alpha: self.alpha, beta: self.beta, weights })
    }

    /// Mix in the contributor distribution with weight `n_c / pool`.
    pub fn evolve(&self, contributors: &[Contribution], pool: usize) -> Result<ParamGrid> {
        let n_c = contributors.len();
        if n_c > pool {
            return Err(Error::invalid(format!("{n_c} contributors exceed the pool size {pool}")));
        }
        if n_c == 0 {
            return Ok(self.clone());
        }
        let target = self.empirical(contributors)?;
        let f = n_c as f64 / pool as f64;
        let weights = self.weights.iter().zip(&target.weights).map(|(old, c)| f * c + (1.0 - f) * old).collect();
        let mut next = ParamGrid { alpha: self.alpha, beta: self.beta, weights };
        next.normalize()?;
        Ok(next)
    }

    /// Total-variation distance `0.5 * sum |p - q|`.
    pub fn tv_distance(&self, other: &ParamGrid) -> Result<f64> {
        if !self.same_axes(other) {
            return Err(Error::invalid("grids have different axes"));
        }
        Ok(0.5 * self.weights.iter().zip(&other.weights).map(|(p, q)| (p - q).abs()).sum::<f64>())
    }

    /// Frozen cumulative table for repeated sampling.
    pub fn sampler(&self) -> GridSampler<'_> {
        let mut acc = 0.0;
        let cdf = self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        GridSampler { grid: self, cdf }
    }

    /// `count` i.i.d. draws of cell parameters in proportion to the weights.
    pub fn sample_params(&self, count: usize, rng: &mut StreamRng) -> Vec<AntParams> {
        self.sampler().draw(count, rng)
    }

    pub fn to_file(&self, meta: GridMeta) -> GridFile {
        GridFile { alpha_axis: self.alpha.values(), beta_axis: self.beta.values(), weights: self.weights.clone(), meta }
    }

    pub fn from_file(file: &GridFile) -> Result<ParamGrid> {
        let axis = |v: &[f64]| -> Result<Axis> {
            match v {
                [] => Err(Error::invalid("empty axis")),
                [x] => Ok(Axis { min: *x, step: 1.0, len: 1 }),
                [first, second, ..] => {
                    let step = ((second - first) * 1e9).round() / 1e9;
                    let axis = Axis { min: *first, step, len: v.len() };
                    if v.iter().enumerate().any(|(i, x)| (axis.value(i) - x).abs() > 1e-9) {
                        return Err(Error::invalid("axis values are not evenly spaced"));
                    }
                    Ok(axis)
                }
            }
        };
        Self::from_weights(axis(&file.alpha_axis)?, axis(&file.beta_axis)?, file.weights.clone())
    }

    /// CSV: alpha, beta, weight.
    pub fn weights_csv(&self) -> String {
        let mut out = csv_line(["alpha", "beta", "weight"]);
        for flat in 0..self.weights.len() {
            let p = self.cell_params(flat);
            out.push_str(&csv_line([sig9(p.alpha), sig9(p.beta), sig9(self.weights[flat])]));
        }
        out
    }
}

pub struct GridSampler<'a> {
    grid: &'a ParamGrid,
    cdf: Vec<f64>,
}

impl GridSampler<'_> {
    pub fn draw_one<R: Rng>(&self, rng: &mut R) -> AntParams {
        let total = *self.cdf.last().expect("nonempty grid");
        let u = rng.random::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.grid.cell_params(idx)
    }

    pub fn draw<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<AntParams> {
        (0..count).map(|_| self.draw_one(rng)).collect()
    }
}

impl ParamSource for GridSampler<'_> {
    fn sample_params(&self, _t: usize, count: usize, rng: &mut StreamRng) -> Vec<AntParams> {
        self.draw(count, rng)
    }
}
