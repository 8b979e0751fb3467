use crate::rect_index::RectIndex;

use super::nicol::max_tile;
use super::Probe;

/// Greedy symmetric probe: grows diagonal cuts one at a time, each as far
/// as possible while every tile of the new row strip and column strip
/// (against the parts already placed, plus the diagonal block) stays within
/// `limit`.
pub fn symmetric_probe(index: &RectIndex, k: usize, limit: f64) -> Probe {
    let n = index.rows();
    let mut cuts = vec![0];
    let mut s = 0;
    let fits = |cuts: &[usize], s: usize, c: usize| -> bool {
        if index.rect_load(s, c, s, c) > limit {
            return false;
        }
        cuts.windows(2).all(|w| {
            index.rect_load(s, c, w[0], w[1]) <= limit && index.rect_load(w[0], w[1], s, c) <= limit
        })
    };
    for _ in 0..k {
        if s == n {
            cuts.push(n);
            continue;
        }
        let (mut lo, mut hi) = (s, n);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if fits(&cuts, s, mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        cuts.push(lo);
        s = lo;
    }
    let feasible = s == n;
    *cuts.last_mut().unwrap() = n;
    Probe { feasible, cuts }
}

/// Symmetric cuts by bisection on the target load with [`symmetric_probe`]
/// as the test. Returns the cuts found at the smallest feasible target and
/// their actual bottleneck.
pub fn pal_symmetric(index: &RectIndex, k: usize) -> (Vec<usize>, f64) {
    assert_eq!(
        index.rows(),
        index.cols(),
        "symmetric partitioning needs a square input"
    );
    let total = index.total();
    let mut lo = total / (k * k) as f64;
    let lower = symmetric_probe(index, k, lo);
    let mut best = if lower.feasible {
        lower.cuts
    } else {
        symmetric_probe(index, k, total).cuts
    };
    if !lower.feasible {
        let mut hi = total;
        while hi - lo > 1e-9 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            let p = symmetric_probe(index, k, mid);
            if p.feasible {
                hi = mid;
                best = p.cuts;
            } else {
                lo = mid;
            }
        }
    }
    let load = max_tile(index, &best, &best);
    (best, load)
}
