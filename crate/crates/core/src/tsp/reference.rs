//! Reference optimum lengths: certified for small instances, otherwise the best
//! of many random-start local-search descents (2-opt alternated with Or-opt
//! segment relocation), with an optional JSON-backed cache.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{exact_optimum, Instance, Tour, EXACT_MAX_N};
use crate::aco::two_opt::two_opt_in_place;
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_RESTARTS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceMethod {
    /// Held-Karp, provably optimal.
    Certified,
    /// Minimum over multi-start 2-opt descents.
    Reference,
}

pub fn reference_method(n: usize) -> ReferenceMethod {
    if n <= EXACT_MAX_N {
        ReferenceMethod::Certified
    } else {
        ReferenceMethod::Reference
    }
}

/// Shortest length found by `restarts` random-start descents, or the exact
/// optimum when the instance is small enough.
pub fn reference_optimum(inst: &Instance, restarts: usize) -> Result<f64> {
    if restarts == 0 {
        return Err(Error::invalid("restarts must be at least 1"));
    }
    if inst.n() <= EXACT_MAX_N {
        return Ok(exact_optimum(inst)?.1);
    }
    Ok((0..restarts as u64).map(|r| descent(inst, r)).fold(f64::INFINITY, f64::min))
}

/// One descent from the random start order of `restart`: 2-opt alternated
/// with segment relocation until neither improves.
pub fn descent(inst: &Instance, restart: u64) -> f64 {
    let mut rng = rng::stream(inst.seed(), &[rng::tag::REFERENCE, restart]);
    let mut order = Tour::random(inst, &mut rng).into_order();
    loop {
        two_opt_in_place(inst, &mut order);
        if !or_opt_pass(inst, &mut order) {
            break;
        }
    }
    super::tour::cycle_length(inst, &order)
}

/// One first-improvement relocation of a 1-3 vertex segment, either orientation.
fn or_opt_pass(inst: &Instance, order: &mut Vec<usize>) -> bool {
    let n = order.len();
    if n < 6 {
        return false;
    }
    for len in 1..=3 {
        for i in 0..n {
            let seg: Vec<usize> = (0..len).map(|k| order[(i + k) % n]).collect();
            let prev = order[(i + n - 1) % n];
            let next = order[(i + len) % n];
            let (first, last) = (seg[0], seg[len - 1]);
            let removed = inst.dist(prev, first) + inst.dist(last, next) - inst.dist(prev, next);
            for k in 0..n - len - 1 {
                let p = order[(i + len + k) % n];
                let q = order[(i + len + k + 1) % n];
                let base = inst.dist(p, q);
                let fwd = inst.dist(p, first) + inst.dist(last, q) - base;
                let rev = inst.dist(p, last) + inst.dist(first, q) - base;
                let (cost, reverse) = if rev < fwd { (rev, true) } else { (fwd, false) };
                if removed - cost > 1e-12 {
                    let mut rest: Vec<usize> = (0..n - len).map(|m| order[(i + len + m) % n]).collect();
                    let at = k + 1;
                    let mut ins = seg.clone();
                    if reverse {
                        ins.reverse();
                    }
                    rest.splice(at..at, ins);
                    *order = rest;
                    return true;
                }
            }
        }
    }
    false
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
struct CacheMap(BTreeMap<String, f64>);

/// Thread-safe memo of reference lengths keyed by instance and restart count.
#[derive(Debug, Default)]
pub struct ReferenceCache {
    entries: Mutex<BTreeMap<String, f64>>,
    path: Option<PathBuf>,
}

impl ReferenceCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Open a cache persisted at `path`; a missing file starts empty.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let entries = match std::fs::read_to_string(&path) {
            Ok(text) => serde_json::from_str::<CacheMap>(&text)?.0,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Self { entries: Mutex::new(entries), path: Some(path) })
    }

    fn key(inst: &Instance, restarts: usize) -> String {
        if inst.n() <= EXACT_MAX_N {
            inst.cache_key()
        } else {
            format!("{}#{}", inst.cache_key(), restarts)
        }
    }

    pub fn get_or_compute(&self, inst: &Instance, restarts: usize) -> Result<f64> {
        let key = Self::key(inst, restarts);
        if let Some(&v) = self.entries.lock().expect("cache lock").get(&key) {
            return Ok(v);
        }
        // computed outside the lock; a concurrent duplicate writes the same value
        let value = reference_optimum(inst, restarts)?;
        self.entries.lock().expect("cache lock").insert(key, value);
        Ok(value)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Write the cache back to its file, if it has one.
    pub fn save(&self) -> Result<()> {
        if let Some(path) = &self.path {
            let map = CacheMap(self.entries.lock().expect("cache lock").clone());
            std::fs::write(path, serde_json::to_string_pretty(&map)?)?;
        }
        Ok(())
    }
}
