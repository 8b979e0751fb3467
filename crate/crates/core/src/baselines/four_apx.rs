use crate::rect_index::RectIndex;
use crate::tensor::DimPrefix;

use super::nicol::Rect2d;
use super::optimal_1d;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourApxConfig {
    pub eps: f64,
    pub max_iter: usize,
}

impl Default for FourApxConfig {
    fn default() -> Self {
        FourApxConfig {
            eps: 0.01,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourApx {
    pub partition: Rect2d,
    /// Smallest target the decision procedure accepted.
    pub target: f64,
}

/// Decision procedure for target `limit`.
///
/// Row and column weights start at 1. Each round partitions both weight
/// vectors optimally into `k` parts; if the heaviest tile is within
/// `limit` the partition is accepted, otherwise the weights of that tile's
/// rows and columns grow by `1 + eps / 2`. Ties between heaviest tiles go
/// to the lexicographically smallest tile. Returns `None` after `max_iter`
/// rounds.
pub fn four_apx_decide(
    index: &RectIndex,
    k: (usize, usize),
    limit: f64,
    config: &FourApxConfig,
) -> Option<Rect2d> {
    let mut row_w = vec![1.0; index.rows()];
    let mut col_w = vec![1.0; index.cols()];
    let factor = 1.0 + config.eps / 2.0;
    for _ in 0..config.max_iter {
        let (rows, _) = optimal_1d(&DimPrefix::from_costs(0, &row_w), k.0);
        let (cols, _) = optimal_1d(&DimPrefix::from_costs(1, &col_w), k.1);
        let mut heaviest = (0usize, 0usize, f64::NEG_INFINITY);
        for a in 0..k.0 {
            for b in 0..k.1 {
                let v = index.rect_load(rows[a], rows[a + 1], cols[b], cols[b + 1]);
                if v > heaviest.2 {
                    heaviest = (a, b, v);
                }
            }
        }
        let (a, b, load) = heaviest;
        if load <= limit {
            return Some(Rect2d { rows, cols, load });
        }
        row_w[rows[a]..rows[a + 1]]
            .iter_mut()
            .for_each(|w| *w *= factor);
        col_w[cols[b]..cols[b + 1]]
            .iter_mut()
            .for_each(|w| *w *= factor);
    }
    None
}

/// Bisection over the target with relative precision `eps`, using
/// [`four_apx_decide`] as the test. The full input load is always accepted.
pub fn four_apx(index: &RectIndex, k: (usize, usize), config: &FourApxConfig) -> FourApx {
    let total = index.total();
    // no partition beats the average tile
    let mut lo = total / (k.0 * k.1) as f64;
    let mut hi = total;
    let mut best =
        four_apx_decide(index, k, hi, config).expect("the total load is always accepted");
    if let Some(p) = four_apx_decide(index, k, lo, config) {
        return FourApx {
            partition: p,
            target: lo,
        };
    }
    while hi > lo * (1.0 + config.eps) {
        let mid = 0.5 * (lo + hi);
        match four_apx_decide(index, k, mid, config) {
            Some(p) => {
                hi = mid;
                if p.load < best.load {
                    best = p;
                }
            }
            None => lo = mid,
        }
    }
    FourApx {
        partition: best,
        target: hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SparseTensor;

    fn dense(n: usize) -> RectIndex {
        let t = SparseTensor::from_pattern(
            vec![n, n],
            (0..n).flat_map(|r| (0..n).map(move |c| vec![r, c])),
        )
        .unwrap();
        RectIndex::new(&t).unwrap()
    }

    #[test]
    fn dense_accepts_immediately() {
        let idx = dense(4);
        let cfg = FourApxConfig {
            eps: 0.01,
            max_iter: 1,
        };
        let p = four_apx_decide(&idx, (2, 2), 4.0, &cfg).unwrap();
        assert_eq!(p.rows, vec![0, 2, 4]);
        assert_eq!(p.load, 4.0);
    }

    #[test]
    fn below_average_rejected() {
        let idx = dense(4);
        assert!(four_apx_decide(&idx, (2, 2), 3.9, &FourApxConfig::default()).is_none());
    }

    #[test]
    fn bisection_on_dense() {
        let r = four_apx(&dense(6), (3, 3), &FourApxConfig::default());
        assert_eq!(r.partition.load, 4.0);
        assert_eq!(r.target, 4.0);
    }
}
