use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-ant heuristic exponents: `alpha` weights pheromone, `beta` weights
/// inverse distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntParams {
    pub alpha: f64,
    pub beta: f64,
}

impl AntParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }
}

/// Winner percentage `p(t)`: linear from `start` at t=1 down to `end` at
/// `t = ramp_end`, constant afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PSchedule {
    pub start: f64,
    pub end: f64,
    pub ramp_end: usize,
}

impl Default for PSchedule {
    fn default() -> Self {
        Self { start: 50.0, end: 8.0, ramp_end: 300 }
    }
}

impl PSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = |p: f64| p > 0.0 && p <= 100.0;
        if !ok(self.start) || !ok(self.end) || self.ramp_end < 1 {
            return Err(Error::invalid(format!("invalid p schedule {self:?}")));
        }
        Ok(())
    }

    /// Percentage of ants allowed to deposit at iteration `t` (1-based).
    pub fn percent(&self, t: usize) -> Result<f64> {
        if t < 1 {
            return Err(Error::invalid("iteration index starts at 1"));
        }
        if t >= self.ramp_end || self.ramp_end == 1 {
            return Ok(self.end);
        }
        let frac = (t - 1) as f64 / (self.ramp_end - 1) as f64;
        Ok(self.start + (self.end - self.start) * frac)
    }
}

/// Shrinking colony: after iteration `after`, the ant count becomes
/// `round(base * exp(-(t - after) / scale))`, never below 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntDecay {
    pub after: usize,
    pub scale: f64,
}

impl Default for AntDecay {
    fn default() -> Self {
        Self { after: 50, scale: 200.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ColonyConfig {
    pub n_ants_base: usize,
    pub t_max: usize,
    pub p_schedule: PSchedule,
    pub speedup: bool,
    pub ant_decay: Option<AntDecay>,
    pub background: f64,
}

impl Default for ColonyConfig {
    fn default() -> Self {
        Self { n_ants_base: 50, t_max: 1000, p_schedule: PSchedule::default(), speedup: false, ant_decay: None, background: 0.01 }
    }
}

impl ColonyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_ants_base < 1 {
            return Err(Error::invalid("n_ants_base must be at least 1"));
        }
        if self.t_max < 1 {
            return Err(Error::invalid("t_max must be at least 1"));
        }
        if !(self.background > 0.0 && self.background.is_finite()) {
            return Err(Error::invalid("background pheromone must be positive"));
        }
        if let Some(d) = self.ant_decay {
            if !(d.scale > 0.0) {
                return Err(Error::invalid("ant decay scale must be positive"));
            }
        }
        self.p_schedule.validate()
    }

    pub fn n_ants(&self, t: usize) -> usize {
        match self.ant_decay {
            Some(d) if t > d.after => {
                let n = self.n_ants_base as f64 * (-((t - d.after) as f64) / d.scale).exp();
                (n.round() as usize).max(1)
            }
            _ => self.n_ants_base,
        }
    }
}
