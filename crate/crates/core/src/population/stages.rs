use super::ParamGrid;
use crate::aco::{AntParams, Contribution, ParamSource};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Inclusive upper iteration bounds of the default problem stages:
/// newly proposed, early, intermediate, late.
pub const DEFAULT_STAGE_BOUNDS: [usize; 4] = [5, 30, 100, 1000];

/// One parameter grid per problem-stage bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct StageBuckets {
    /// Inclusive upper bound of each bucket; the last one is `t_max`.
    upper: Vec<usize>,
    grids: Vec<ParamGrid>,
}

impl StageBuckets {
    pub fn new(upper: Vec<usize>, init: &ParamGrid) -> Result<Self> {
        if upper.is_empty() || upper[0] < 1 || upper.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!("stage bounds must be increasing and start at >= 1, got {upper:?}")));
        }
        let grids = vec![init.clone(); upper.len()];
        Ok(Self { upper, grids })
    }

    /// Default stage split with the last bucket ending at `t_max`.
    pub fn standard(t_max: usize, init: &ParamGrid) -> Result<Self> {
        let mut upper: Vec<usize> = DEFAULT_STAGE_BOUNDS[..3].iter().copied().filter(|&b| b < t_max).collect();
        upper.push(t_max.max(1));
        Self::new(upper, init)
    }

    pub fn t_max(&self) -> usize {
        *self.upper.last().expect("at least one bucket")
    }

    pub fn bounds(&self) -> Vec<(usize, usize)> {
        let mut lo = 1;
        self.upper
            .iter()
            .map(|&hi| {
                let r = (lo, hi);
                lo = hi + 1;
                r
            })
            .collect()
    }

    pub fn grids(&self) -> &[ParamGrid] {
        &self.grids
    }

    pub fn grid(&self, bucket: usize) -> &ParamGrid {
        &self.grids[bucket]
    }

    pub fn bucket_of(&self, t: usize) -> Result<usize> {
        if t < 1 || t > self.t_max() {
            return Err(Error::invalid(format!("iteration {t} outside 1..={}", self.t_max())));
        }
        Ok(self.upper.partition_point(|&hi| hi < t))
    }

    /// Apply the mixing update to each bucket with only its own contributors.
    pub fn evolve(&self, contributors: &[Contribution], pool: usize) -> Result<Self> {
        let mut per_bucket: Vec<Vec<Contribution>> = vec![Vec::new(); self.grids.len()];
        for c in contributors {
            per_bucket[self.bucket_of(c.t)?].push(*c);
        }
        let grids = self.grids.iter().zip(&per_bucket).map(|(g, cs)| g.evolve(cs, pool)).collect::<Result<Vec<_>>>()?;
        Ok(Self { upper: self.upper.clone(), grids })
    }

    /// Equal-weight mixture of the bucket grids.
    pub fn union(&self) -> ParamGrid {
        let k = self.grids.len() as f64;
        let first = &self.grids[0];
        let weights = (0..first.weights().len()).map(|i| self.grids.iter().map(|g| g.weights()[i]).sum::<f64>() / k).collect();
        ParamGrid::from_weights(first.alpha_axis(), first.beta_axis(), weights).expect("mixture of normalized grids")
    }

    pub fn sampler(&self) -> StagedSampler<'_> {
        StagedSampler { buckets: self, samplers: self.grids.iter().map(ParamGrid::sampler).collect() }
    }
}

pub struct StagedSampler<'a> {
    buckets: &'a StageBuckets,
    samplers: Vec<super::GridSampler<'a>>,
}

impl ParamSource for StagedSampler<'_> {
    fn sample_params(&self, t: usize, count: usize, rng: &mut StreamRng) -> Vec<AntParams> {
        // iterations past the configured horizon keep using the last stage
        let b = self.buckets.bucket_of(t.min(self.buckets.t_max())).unwrap_or(self.samplers.len() - 1);
        self.samplers[b].draw(count, rng)
    }
}
