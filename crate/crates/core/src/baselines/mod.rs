//! Comparison partitioners.
//!
//! Everything here is built on one primitive: partitioning a sequence of
//! slices into `k` contiguous intervals under a monotone interval cost. For a
//! plain cost vector the interval cost is a prefix-sum difference; for the
//! conditional step of the 2-D methods it is the heaviest tile an interval
//! produces against a fixed cut array of the other dimension.

mod brute;
mod four_apx;
mod nicol;
mod pal;

pub use brute::{brute_force_optimal, enumeration_count, BruteForce, DEFAULT_BUDGET};
pub use four_apx::{four_apx, four_apx_decide, FourApx, FourApxConfig};
pub use nicol::{
    conditional_optimum, max_tile, nicol_2d, two_sweep, Axis, ConditionalCost, Rect2d,
};
pub use pal::{pal_symmetric, symmetric_probe};

use crate::tensor::DimPrefix;

/// Evenly spaced cuts `floor(j * n / k)`.
pub fn uniform_partition(n: usize, k: usize) -> Vec<usize> {
    assert!(k >= 1, "need at least one part");
    (0..=k).map(|j| j * n / k).collect()
}

/// Cost of a half-open interval of slices. Must be non-decreasing when the
/// interval grows on either side.
pub trait IntervalCost {
    fn len(&self) -> usize;
    fn cost(&self, a: usize, b: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl IntervalCost for DimPrefix {
    fn len(&self) -> usize {
        self.extent()
    }

    fn cost(&self, a: usize, b: usize) -> f64 {
        self.range(a, b)
    }
}

/// Outcome of a greedy feasibility probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub feasible: bool,
    /// Greedy cuts. When infeasible the last cut is forced to the end.
    pub cuts: Vec<usize>,
}

/// Largest `e` in `[a, n]` with `cost(a, e) <= limit`.
fn extend<C: IntervalCost + ?Sized>(c: &C, a: usize, limit: f64) -> usize {
    let (mut lo, mut hi) = (a, c.len());
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if c.cost(a, mid) <= limit {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Greedy probe of the suffix starting at `start` with `k` parts: each part
/// takes the longest interval whose cost stays within `limit`.
fn probe_from<C: IntervalCost + ?Sized>(
    c: &C,
    start: usize,
    k: usize,
    limit: f64,
) -> (bool, Vec<usize>) {
    let n = c.len();
    let mut cuts = Vec::with_capacity(k + 1);
    cuts.push(start);
    let mut s = start;
    for _ in 0..k {
        if s < n {
            s = extend(c, s, limit);
        }
        cuts.push(s);
    }
    let feasible = s == n;
    *cuts.last_mut().unwrap() = n;
    (feasible, cuts)
}

/// Greedy feasibility probe over the whole sequence.
pub fn probe<C: IntervalCost + ?Sized>(c: &C, k: usize, limit: f64) -> Probe {
    let (feasible, cuts) = probe_from(c, 0, k, limit);
    Probe { feasible, cuts }
}

/// Probe on a plain cost vector given by its prefix sums.
pub fn probe_1d(prefix: &DimPrefix, k: usize, limit: f64) -> Probe {
    probe(prefix, k, limit)
}

/// Minimal bottleneck over all partitions of the sequence into `k` parts.
///
/// For the suffix starting at `s` with `m` parts, let `e` be the smallest
/// end whose cost `cost(s, e)` passes the probe. Either the optimum equals
/// that cost, or the optimal greedy first part is `[s, e - 1)` and the
/// optimum is that of the remaining suffix with `m - 1` parts. The result is
/// always one of the evaluated interval costs, so no tolerance is involved.
pub fn optimal_bottleneck<C: IntervalCost + ?Sized>(c: &C, k: usize) -> f64 {
    assert!(k >= 1, "need at least one part");
    let n = c.len();
    let mut s = 0;
    let mut best = f64::INFINITY;
    for m in (2..=k).rev() {
        if s >= n {
            break;
        }
        let (mut lo, mut hi) = (s + 1, n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if probe_from(c, s, m, c.cost(s, mid)).0 {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        best = best.min(c.cost(s, lo));
        s = lo - 1;
    }
    best.min(c.cost(s, n))
}

/// Exact optimal partition: the greedy cuts at the minimal bottleneck.
pub fn optimal_partition<C: IntervalCost + ?Sized>(c: &C, k: usize) -> (Vec<usize>, f64) {
    let b = optimal_bottleneck(c, k);
    let p = probe(c, k, b);
    debug_assert!(p.feasible);
    (p.cuts, b)
}

/// Exact 1-D partition of a cost vector into `k` parts.
pub fn optimal_1d(prefix: &DimPrefix, k: usize) -> (Vec<usize>, f64) {
    optimal_partition(prefix, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn costs(v: &[f64]) -> DimPrefix {
        DimPrefix::from_costs(0, v)
    }

    /// Exhaustive optimum over all cut placements (duplicates allowed).
    fn enumerate_1d(v: &[f64], k: usize) -> f64 {
        let p = costs(v);
        let n = v.len();
        (0..k - 1)
            .map(|_| 0..=n)
            .multi_cartesian_product()
            .filter(|c| c.windows(2).all(|w| w[0] <= w[1]))
            .map(|inner| {
                let mut cuts = vec![0];
                cuts.extend(inner);
                cuts.push(n);
                cuts.windows(2)
                    .map(|w| p.range(w[0], w[1]))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(uniform_partition(8, 3), vec![0, 2, 5, 8]);
        assert_eq!(uniform_partition(8, 8), (0..=8).collect::<Vec<_>>());
        let p = uniform_partition(5, 10);
        assert_eq!(p.len(), 11);
        assert_eq!(p[10], 5);
        assert!(p.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn probe_examples() {
        let rows = costs(&[5.0, 4.0, 2.0, 0.0, 1.0, 0.0, 2.0, 1.0]);
        assert!(!probe_1d(&rows, 3, 5.0).feasible);
        let p = probe_1d(&rows, 3, 6.0);
        assert!(p.feasible);
        // the zero-cost row 3 joins the second part
        assert_eq!(p.cuts, vec![0, 1, 4, 8]);
        let one = probe_1d(&rows, 1, 15.0);
        assert!(one.feasible);
        assert_eq!(one.cuts, vec![0, 8]);
        assert!(!probe_1d(&rows, 8, 4.0).feasible);
    }

    #[test]
    fn optimal_examples() {
        let (cuts, b) = optimal_1d(&costs(&[3.0, 1.0, 2.0, 2.0, 1.0, 3.0]), 3);
        assert_eq!(b, 4.0);
        assert_eq!(cuts, vec![0, 2, 4, 6]);
        let (_, b) = optimal_1d(&costs(&[5.0, 4.0, 2.0, 0.0, 1.0, 0.0, 2.0, 1.0]), 3);
        assert_eq!(b, 6.0);
        let (cuts, b) = optimal_1d(&costs(&[1.0; 60]), 6);
        assert_eq!(b, 10.0);
        assert_eq!(cuts, (0..=6).map(|j| 10 * j).collect::<Vec<_>>());
        // more parts than slices
        let (cuts, b) = optimal_1d(&costs(&[2.0, 7.0]), 4);
        assert_eq!(b, 7.0);
        assert_eq!(cuts.len(), 5);
    }

    proptest! {
        #[test]
        fn optimal_matches_enumeration(
            v in prop::collection::vec(0u8..6, 1..=12),
            k in 1usize..=4,
        ) {
            let v: Vec<f64> = v.into_iter().map(f64::from).collect();
            let (cuts, b) = optimal_1d(&costs(&v), k);
            prop_assert_eq!(b, enumerate_1d(&v, k));
            let p = costs(&v);
            let got = cuts.windows(2).map(|w| p.range(w[0], w[1])).fold(0.0, f64::max);
            prop_assert_eq!(got, b);
            prop_assert_eq!(cuts[0], 0);
            prop_assert_eq!(*cuts.last().unwrap(), v.len());
        }

        #[test]
        fn probe_feasibility_monotone(
            v in prop::collection::vec(0u8..9, 1..=20),
            k in 1usize..=5,
            a in 0u32..60,
            b in 0u32..60,
        ) {
            let v: Vec<f64> = v.into_iter().map(f64::from).collect();
            let p = costs(&v);
            let (lo, hi) = (a.min(b) as f64, a.max(b) as f64);
            if probe_1d(&p, k, lo).feasible {
                prop_assert!(probe_1d(&p, k, hi).feasible);
            }
        }
    }
}
