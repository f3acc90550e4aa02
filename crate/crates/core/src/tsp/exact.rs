//! Held-Karp dynamic program over vertex subsets.

use super::{Instance, Tour};
use crate::error::{Error, Result};

/// Largest instance the exact solver accepts.
pub const EXACT_MAX_N: usize = 15;

/// Certified optimal tour and its length.
pub fn exact_optimum(inst: &Instance) -> Result<(Tour, f64)> {
    let n = inst.n();
    if n > EXACT_MAX_N {
        return Err(Error::SizeExceeded { n, max: EXACT_MAX_N });
    }
    // Vertex 0 is the fixed origin; subsets range over vertices 1..n,
    // bit k standing for vertex k + 1.
    let m = n - 1;
    let full = (1usize << m) - 1;
    let mut cost = vec![f64::INFINITY; (1 << m) * m];
    let mut parent = vec![u8::MAX; (1 << m) * m];
    for k in 0..m {
        cost[(1 << k) * m + k] = inst.dist(0, k + 1);
    }
    for set in 1..=full {
        for last in 0..m {
            if set & (1 << last) == 0 {
                continue;
            }
            let here = cost[set * m + last];
            if !here.is_finite() {
                continue;
            }
            let row = inst.row(last + 1);
            let mut rest = full & !set;
            while rest != 0 {
                let next = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let to = set | (1 << next);
                let cand = here + row[next + 1];
                let slot = to * m + next;
                if cand < cost[slot] {
                    cost[slot] = cand;
                    parent[slot] = last as u8;
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut best_last = 0;
    for last in 0..m {
        let c = cost[full * m + last] + inst.dist(last + 1, 0);
        if c < best {
            best = c;
            best_last = last;
        }
    }
    let mut order = Vec::with_capacity(n);
    let (mut set, mut last) = (full, best_last);
    loop {
        order.push(last + 1);
        let p = parent[set * m + last];
        set &= !(1 << last);
        if p == u8::MAX {
            break;
        }
        last = p as usize;
    }
    order.push(0);
    order.reverse();
    let tour = Tour::new(inst, order)?;
    Ok((tour, best))
}
