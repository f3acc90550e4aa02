use serde::{Deserialize, Serialize};

use crate::aco::Contribution;
use crate::error::{Error, Result};
use crate::format::{csv_line, sig9};
use crate::population::{summarize, ParamGrid, StageBuckets};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketStats {
    pub first_t: usize,
    pub last_t: usize,
    /// Means of the bucket's trained grid.
    pub grid_mean_alpha: f64,
    pub grid_mean_beta: f64,
    /// Raw contributor statistics for the bucket.
    pub contributors: usize,
    pub contrib_mean_alpha: f64,
    pub contrib_mean_beta: f64,
    pub contrib_mean_improvement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub buckets: Vec<BucketStats>,
    /// Mean beta of the first bucket exceeds that of the last.
    pub beta_decreases: bool,
    pub beta_gap: f64,
    /// Last bucket's mean beta lies below the time-independent mode.
    pub late_below_mode: bool,
    pub plain_mode_beta: f64,
    /// Total variation between the equal mixture of buckets and the plain grid.
    pub union_tv: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Per-stage statistics of a staged model against the time-independent grid.
pub fn stage_analysis(buckets: &StageBuckets, contributors: &[Contribution], plain: &ParamGrid) -> Result<StageReport> {
    let stats: Vec<BucketStats> = buckets
        .bounds()
        .into_iter()
        .zip(buckets.grids())
        .map(|((lo, hi), grid)| {
            let s = summarize(grid);
            let mine: Vec<&Contribution> = contributors.iter().filter(|c| (lo..=hi).contains(&c.t)).collect();
            BucketStats {
                first_t: lo,
                last_t: hi,
                grid_mean_alpha: s.mean_alpha,
                grid_mean_beta: s.mean_beta,
                contributors: mine.len(),
                contrib_mean_alpha: mean(mine.iter().map(|c| c.params.alpha)),
                contrib_mean_beta: mean(mine.iter().map(|c| c.params.beta)),
                contrib_mean_improvement: mean(mine.iter().map(|c| c.improvement)),
            }
        })
        .collect();
    let first = stats.first().ok_or_else(|| Error::invalid("no buckets"))?;
    let last = stats.last().expect("nonempty");
    let plain_summary = summarize(plain);
    let beta_gap = first.grid_mean_beta - last.grid_mean_beta;
    Ok(StageReport {
        beta_decreases: beta_gap > 0.0,
        beta_gap,
        late_below_mode: last.grid_mean_beta < plain_summary.mode_beta,
        plain_mode_beta: plain_summary.mode_beta,
        union_tv: buckets.union().tv_distance(plain)?,
        buckets: stats,
    })
}

/// CSV: alpha, beta, bucket (1-based), one row per contributor.
pub fn stage_scatter_csv(buckets: &StageBuckets, contributors: &[Contribution]) -> Result<String> {
    let mut out = csv_line(["alpha", "beta", "bucket"]);
    for c in contributors {
        let b = buckets.bucket_of(c.t)?;
        out.push_str(&csv_line([sig9(c.params.alpha), sig9(c.params.beta), (b + 1).to_string()]));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageImprovement {
    pub first_t: usize,
    pub last_t: usize,
    pub count: usize,
    pub mean_improvement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementReport {
    pub stages: Vec<StageImprovement>,
    /// Mean improvement never rises from one non-empty stage to the next.
    pub non_increasing: bool,
    #[serde(skip)]
    pub records: Vec<(usize, f64)>,
}

impl ImprovementReport {
    /// CSV: t, improvement_fraction.
    pub fn to_csv(&self) -> String {
        let mut out = csv_line(["t", "improvement_fraction"]);
        for (t, f) in &self.records {
            out.push_str(&csv_line([t.to_string(), sig9(*f)]));
        }
        out
    }
}

/// Improvement fraction of every contribution against the stage it came from.
pub fn improvement_vs_stage(contributors: &[Contribution], stages: &[(usize, usize)]) -> ImprovementReport {
    let records: Vec<(usize, f64)> = contributors.iter().map(|c| (c.t, c.improvement)).collect();
    let stages: Vec<StageImprovement> = stages
        .iter()
        .map(|&(lo, hi)| {
            let xs: Vec<f64> = records.iter().filter(|(t, _)| (lo..=hi).contains(t)).map(|r| r.1).collect();
            StageImprovement { first_t: lo, last_t: hi, count: xs.len(), mean_improvement: mean(xs.into_iter()) }
        })
        .collect();
    let means: Vec<f64> = stages.iter().filter(|s| s.count > 0).map(|s| s.mean_improvement).collect();
    let non_increasing = means.windows(2).all(|w| w[1] <= w[0]);
    ImprovementReport { stages, non_increasing, records }
}
