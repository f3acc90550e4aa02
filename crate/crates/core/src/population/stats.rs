use serde::{Deserialize, Serialize};

use super::ParamGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub mode_alpha: f64,
    pub mode_beta: f64,
    /// More than one cell shares the maximum weight; the mode is the lowest index.
    pub mode_tied: bool,
    pub mean_alpha: f64,
    pub mean_beta: f64,
    pub sd_alpha: f64,
    pub sd_beta: f64,
    /// Pearson correlation of alpha and beta; 0 when either variance vanishes.
    pub correlation: f64,
    pub correlation_degenerate: bool,
    pub alpha_marginal: Vec<f64>,
    pub beta_marginal: Vec<f64>,
}

pub fn summarize(grid: &ParamGrid) -> GridSummary {
    let (na, nb) = (grid.alpha_axis().len, grid.beta_axis().len);
    let weights = grid.weights();
    let mut mode = 0;
    let mut tied = false;
    for (i, &w) in weights.iter().enumerate().skip(1) {
        if w > weights[mode] {
            mode = i;
            tied = false;
        } else if w == weights[mode] {
            tied = true;
        }
    }
    let mut alpha_marginal = vec![0.0; na];
    let mut beta_marginal = vec![0.0; nb];
    for a in 0..na {
        for b in 0..nb {
            let w = grid.weight(a, b);
            alpha_marginal[a] += w;
            beta_marginal[b] += w;
        }
    }
    let av = grid.alpha_axis().values();
    let bv = grid.beta_axis().values();
    let mean_alpha: f64 = alpha_marginal.iter().zip(&av).map(|(w, x)| w * x).sum();
    let mean_beta: f64 = beta_marginal.iter().zip(&bv).map(|(w, x)| w * x).sum();
    let var_alpha: f64 = alpha_marginal.iter().zip(&av).map(|(w, x)| w * (x - mean_alpha).powi(2)).sum();
    let var_beta: f64 = beta_marginal.iter().zip(&bv).map(|(w, x)| w * (x - mean_beta).powi(2)).sum();
    let mut cov = 0.0;
    for a in 0..na {
        for b in 0..nb {
            cov += grid.weight(a, b) * (av[a] - mean_alpha) * (bv[b] - mean_beta);
        }
    }
    let degenerate = var_alpha < 1e-15 || var_beta < 1e-15;
    let correlation = if degenerate { 0.0 } else { cov / (var_alpha * var_beta).sqrt() };
    let mode_params = grid.cell_params(mode);
    GridSummary {
        mode_alpha: mode_params.alpha,
        mode_beta: mode_params.beta,
        mode_tied: tied,
        mean_alpha,
        mean_beta,
        sd_alpha: var_alpha.sqrt(),
        sd_beta: var_beta.sqrt(),
        correlation,
        correlation_degenerate: degenerate,
        alpha_marginal,
        beta_marginal,
    }
}
