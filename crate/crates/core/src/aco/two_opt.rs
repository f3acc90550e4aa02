//! Segment-reversal local search.
//!
//! For positions `i < j` in the cycle `... a b ... c d ...` (with `a` before
//! position `i` and `d` after position `j`), reversing `b..=c` shortens the
//! cycle iff `d(a,b) + d(c,d) > d(a,c) + d(b,d)`.

use crate::tsp::{Instance, Tour};

/// Gain of reversing positions `i..=j`, or `None` for the whole-cycle
/// reversal which is a no-op.
#[inline]
fn move_gain(inst: &Instance, order: &[usize], i: usize, j: usize) -> Option<(f64, f64)> {
    let n = order.len();
    if i == 0 && j == n - 1 {
        return None;
    }
    let a = order[(i + n - 1) % n];
    let b = order[i];
    let c = order[j];
    let d = order[(j + 1) % n];
    Some((inst.dist(a, b) + inst.dist(c, d), inst.dist(a, c) + inst.dist(b, d)))
}

/// First improving reversal in scan order, if any.
fn find_improvement(inst: &Instance, order: &[usize]) -> Option<(usize, usize)> {
    let n = order.len();
    for i in 0..n - 1 {
        let a = order[(i + n - 1) % n];
        let b = order[i];
        let row_a = inst.row(a);
        let row_b = inst.row(b);
        let d_ab = row_a[b];
        let j_end = if i == 0 { n - 1 } else { n };
        for j in (i + 1)..j_end {
            let c = order[j];
            let d = order[if j + 1 == n { 0 } else { j + 1 }];
            if d_ab + inst.dist(c, d) > row_a[c] + row_b[d] {
                return Some((i, j));
            }
        }
    }
    None
}

/// Apply improving reversals until a full pass finds none. Each accepted
/// reversal restarts the scan from the first position.
pub fn two_opt(inst: &Instance, tour: &Tour) -> Tour {
    let mut order = tour.order().to_vec();
    two_opt_in_place(inst, &mut order);
    let out = Tour::from_order_unchecked(inst, order);
    // the reversals only ever shorten the cycle; guard against summation-order drift
    if out.length() > tour.length() {
        return tour.clone();
    }
    out
}

pub(crate) fn two_opt_in_place(inst: &Instance, order: &mut [usize]) {
    if order.len() < 4 {
        return;
    }
    while let Some((i, j)) = find_improvement(inst, order) {
        order[i..=j].reverse();
    }
}

/// True when no reversal satisfies the strict improvement condition.
pub fn is_two_opt_fixpoint(inst: &Instance, order: &[usize]) -> bool {
    let n = order.len();
    (0..n).all(|i| ((i + 1)..n).all(|j| move_gain(inst, order, i, j).is_none_or(|(old, new)| old <= new)))
}
