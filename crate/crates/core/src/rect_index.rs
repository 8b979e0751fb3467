//! Static rectangle-load index over a 2-D entry set.
//!
//! The index is a merge tree over one axis (the shorter one). Level `l`
//! splits that axis into aligned blocks of `2^l` slices; every block keeps
//! its entries sorted by the other coordinate together with a running weight
//! sum. A query decomposes its range on the tree axis into `O(log n)` blocks
//! and binary-searches each block on the other axis, for `O(log n log m)`
//! work. Storage is one copy of the entries per level.

use crate::error::Result;
use crate::tensor::SparseTensor;

#[derive(Debug, Clone)]
struct Level {
    /// Coordinates on the searched axis, sorted within each block.
    keys: Vec<u32>,
    /// `cum[i]` is the weight of `keys[..i]` across the whole level.
    cum: Vec<f64>,
    /// Block `b` occupies `keys[offsets[b]..offsets[b + 1]]`.
    offsets: Vec<usize>,
}

impl Level {
    fn block_sum(&self, block: usize, lo: u32, hi: u32) -> f64 {
        let (a, b) = (self.offsets[block], self.offsets[block + 1]);
        let keys = &self.keys[a..b];
        let i = keys.partition_point(|&k| k < lo);
        let j = keys.partition_point(|&k| k < hi);
        self.cum[a + j] - self.cum[a + i]
    }
}

/// Answers weighted rectangle queries `rows [r0, r1) x cols [c0, c1)`.
#[derive(Debug, Clone)]
pub struct RectIndex {
    rows: usize,
    cols: usize,
    /// When set, the tree is built over columns and searches rows.
    transposed: bool,
    levels: Vec<Level>,
    total: f64,
}

impl RectIndex {
    /// Builds the index from a 2-D tensor.
    pub fn new(tensor: &SparseTensor) -> Result<Self> {
        let (rows, cols) = tensor.shape_2d()?;
        let transposed = cols < rows;
        let tree_extent = if transposed { cols } else { rows };
        let width = tree_extent.max(1).next_power_of_two();

        // (tree key, search key, weight) sorted by tree key then search key
        let mut items: Vec<(u32, u32, f64)> = tensor
            .entries()
            .map(|(ix, w)| {
                let (r, c) = (ix[0] as u32, ix[1] as u32);
                if transposed {
                    (c, r, w)
                } else {
                    (r, c, w)
                }
            })
            .collect();
        items.sort_by_key(|&(t, s, _)| (t, s));

        let mut levels = Vec::new();
        // leaf level: one block per slice
        let mut offsets = vec![0usize; width + 1];
        for &(t, _, _) in &items {
            offsets[t as usize + 1] += 1;
        }
        for b in 0..width {
            offsets[b + 1] += offsets[b];
        }
        let mut keys: Vec<u32> = items.iter().map(|&(_, s, _)| s).collect();
        let mut weights: Vec<f64> = items.iter().map(|&(_, _, w)| w).collect();
        levels.push(make_level(keys.clone(), &weights, offsets.clone()));

        let mut blocks = width;
        while blocks > 1 {
            let mut next_keys = Vec::with_capacity(keys.len());
            let mut next_weights = Vec::with_capacity(weights.len());
            let mut next_offsets = Vec::with_capacity(blocks / 2 + 1);
            next_offsets.push(0);
            for b in (0..blocks).step_by(2) {
                let (a0, a1) = (offsets[b], offsets[b + 1]);
                let (b0, b1) = (offsets[b + 1], offsets[b + 2]);
                merge_into(
                    (&keys[a0..a1], &weights[a0..a1]),
                    (&keys[b0..b1], &weights[b0..b1]),
                    &mut next_keys,
                    &mut next_weights,
                );
                next_offsets.push(next_keys.len());
            }
            keys = next_keys;
            weights = next_weights;
            offsets = next_offsets;
            blocks /= 2;
            levels.push(make_level(keys.clone(), &weights, offsets.clone()));
        }

        Ok(RectIndex {
            rows,
            cols,
            transposed,
            levels,
            total: tensor.total_load(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Load of `rows [r0, r1) x cols [c0, c1)`. Ranges are clamped to the
    /// extents; empty ranges give 0.
    pub fn rect_load(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
        let (r1, c1) = (r1.min(self.rows), c1.min(self.cols));
        if r0 >= r1 || c0 >= c1 {
            return 0.0;
        }
        let (t0, t1, s0, s1) = if self.transposed {
            (c0, c1, r0, r1)
        } else {
            (r0, r1, c0, c1)
        };
        let (s0, s1) = (s0 as u32, s1 as u32);
        let (mut lo, mut hi) = (t0, t1);
        let mut sum = 0.0;
        for level in &self.levels {
            if lo >= hi {
                break;
            }
            if lo & 1 == 1 {
                sum += level.block_sum(lo, s0, s1);
                lo += 1;
            }
            if hi & 1 == 1 {
                hi -= 1;
                sum += level.block_sum(hi, s0, s1);
            }
            lo >>= 1;
            hi >>= 1;
        }
        sum
    }

    /// Approximate heap footprint in bytes.
    pub fn memory_bytes(&self) -> usize {
        self.levels
            .iter()
            .map(|l| l.keys.len() * 4 + l.cum.len() * 8 + l.offsets.len() * 8)
            .sum()
    }
}

fn make_level(keys: Vec<u32>, weights: &[f64], offsets: Vec<usize>) -> Level {
    let mut cum = Vec::with_capacity(weights.len() + 1);
    let mut acc = 0.0;
    cum.push(acc);
    for &w in weights {
        acc += w;
        cum.push(acc);
    }
    Level { keys, cum, offsets }
}

fn merge_into(
    (ak, aw): (&[u32], &[f64]),
    (bk, bw): (&[u32], &[f64]),
    keys: &mut Vec<u32>,
    weights: &mut Vec<f64>,
) {
    let (mut i, mut j) = (0, 0);
    while i < ak.len() && j < bk.len() {
        if ak[i] <= bk[j] {
            keys.push(ak[i]);
            weights.push(aw[i]);
            i += 1;
        } else {
            keys.push(bk[j]);
            weights.push(bw[j]);
            j += 1;
        }
    }
    keys.extend_from_slice(&ak[i..]);
    weights.extend_from_slice(&aw[i..]);
    keys.extend_from_slice(&bk[j..]);
    weights.extend_from_slice(&bw[j..]);
}

/// Reference rectangle load by scanning every entry.
pub fn naive_rect_load(tensor: &SparseTensor, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
    tensor
        .entries()
        .filter(|(ix, _)| (r0..r1).contains(&ix[0]) && (c0..c1).contains(&ix[1]))
        .map(|(_, w)| w)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy_matrix;
    use crate::tensor::SparseTensor;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn toy_queries() {
        let idx = RectIndex::new(&toy_matrix()).unwrap();
        assert_eq!(idx.rect_load(0, 8, 0, 8), 15.0);
        assert_eq!(idx.rect_load(0, 2, 4, 8), 5.0);
        assert_eq!(idx.rect_load(2, 4, 0, 2), 0.0);
        assert_eq!(idx.rect_load(3, 3, 0, 8), 0.0);
        // clamped
        assert_eq!(idx.rect_load(0, 100, 0, 100), 15.0);
    }

    #[test]
    fn empty_tensor_is_zero_everywhere() {
        let t = SparseTensor::new(vec![5, 7], Vec::new()).unwrap();
        let idx = RectIndex::new(&t).unwrap();
        for r in 0..=5 {
            for c in 0..=7 {
                assert_eq!(idx.rect_load(0, r, c, 7), 0.0);
            }
        }
    }

    #[test]
    fn rejects_non_2d() {
        let t = SparseTensor::new(vec![3], Vec::new()).unwrap();
        assert!(RectIndex::new(&t).is_err());
    }

    #[test]
    fn random_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(m, n) in &[(200usize, 300usize), (300, 200), (1, 50), (37, 1)] {
            let raw: Vec<_> = (0..5000)
                .map(|_| {
                    (
                        vec![rng.gen_range(0..m), rng.gen_range(0..n)],
                        rng.gen_range(1..4) as f64,
                    )
                })
                .collect();
            let t = SparseTensor::new(vec![m, n], raw).unwrap();
            let idx = RectIndex::new(&t).unwrap();
            for _ in 0..1000 {
                let (mut r0, mut r1) = (rng.gen_range(0..=m), rng.gen_range(0..=m));
                let (mut c0, mut c1) = (rng.gen_range(0..=n), rng.gen_range(0..=n));
                if r0 > r1 {
                    std::mem::swap(&mut r0, &mut r1);
                }
                if c0 > c1 {
                    std::mem::swap(&mut c0, &mut c1);
                }
                assert_eq!(
                    idx.rect_load(r0, r1, c0, c1),
                    naive_rect_load(&t, r0, r1, c0, c1)
                );
            }
        }
    }
}
