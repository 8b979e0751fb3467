//! Building blocks of one optimizer iteration.
//!
//! Cut positions are parametrized in load space: for a group with
//! averaged prefix `F`, the boundary `p[j]` is `F^-1(pi[j])`. Each iteration
//! reads the slab maxima of the current tiling, turns them into a
//! subgradient over `pi`, and takes a diminishing step.

use crate::error::{Error, Result};
use crate::problem::{Partition, TileLoads};
use crate::tensor::{prefix_inverse, DimPrefix};

use super::{ConstraintSpec, OptimizerConfig};

/// Averaged prefix of the dimensions in one constraint group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPrefix {
    values: Vec<f64>,
}

impl GroupPrefix {
    /// Averages the member prefixes. All members must share an extent.
    pub fn average(members: &[&DimPrefix]) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Constraint("empty group".into()))?;
        let n = first.values().len();
        if members.iter().any(|p| p.values().len() != n) {
            return Err(Error::Constraint(
                "grouped dimensions have different extents".into(),
            ));
        }
        let scale = members.len() as f64;
        let values = (0..n)
            .map(|x| members.iter().map(|p| p.values()[x]).sum::<f64>() / scale)
            .collect();
        Ok(GroupPrefix { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extent(&self) -> usize {
        self.values.len() - 1
    }

    /// Load at the upper end of the group's range.
    pub fn total(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Load-space parameters of an index-space cut array.
    pub fn parametrize(&self, cuts: &[usize]) -> Vec<f64> {
        cuts.iter().map(|&x| self.values[x]).collect()
    }

    /// Cut array of load-space parameters, endpoints pinned to the extent.
    pub fn materialize(&self, pi: &[f64]) -> Vec<usize> {
        let n = self.extent();
        let k = pi.len() - 1;
        let mut cuts: Vec<usize> = pi
            .iter()
            .map(|&y| prefix_inverse(&self.values, y).min(n))
            .collect();
        cuts[0] = 0;
        cuts[k] = n;
        debug_assert!(cuts.windows(2).all(|w| w[0] <= w[1]));
        cuts
    }
}

/// Slab maxima `r_i` of the tile loads along dimension `dim`.
pub fn slab_maxima(tiles: &TileLoads, dim: usize) -> Vec<f64> {
    tiles.slab_maxima(dim)
}

/// Element-wise maximum of the slab maxima of each group's members.
pub fn group_maxima(r: &[Vec<f64>], spec: &ConstraintSpec) -> Result<Vec<Vec<f64>>> {
    spec.groups()
        .iter()
        .map(|g| {
            let len = r[g[0]].len();
            let mut out = vec![f64::NEG_INFINITY; len];
            for &i in g {
                if r[i].len() != len {
                    return Err(Error::Mismatch(format!(
                        "slab maxima of grouped dimensions have lengths {len} and {}",
                        r[i].len()
                    )));
                }
                out.iter_mut().zip(&r[i]).for_each(|(o, &v)| *o = o.max(v));
            }
            Ok(out)
        })
        .collect()
}

/// Subgradient over the `k + 1` load-space parameters of one group:
/// `g[j] = sum(r[..j]) - j/k * sum(r)`. The endpoints are zero.
pub fn subgradient(r: &[f64]) -> Vec<f64> {
    let k = r.len() as f64;
    let mut g = vec![0.0];
    g.extend(numerators(r).into_iter().map(|n| n / k));
    if !r.is_empty() {
        g.push(0.0);
    }
    g
}

/// `k * g[j]` for the interior `j`, computed on `r - r[0]` so that equal
/// maxima give exact zeros and integer loads stay exact.
fn numerators(r: &[f64]) -> Vec<f64> {
    let Some(&base) = r.first() else {
        return Vec::new();
    };
    let k = r.len();
    let d: Vec<f64> = r.iter().map(|&v| v - base).collect();
    let sum: f64 = d.iter().sum();
    let mut acc = 0.0;
    (1..k)
        .map(|j| {
            acc += d[j - 1];
            k as f64 * acc - j as f64 * sum
        })
        .collect()
}

/// Diminishing step `mu / sqrt(t / k + T)`.
pub fn step_size(t: usize, k: usize, config: &OptimizerConfig) -> f64 {
    config.mu / (t as f64 / k as f64 + config.offset).sqrt()
}

/// `pi - eta * g` on the interior, clamped to `[0, total]` and sorted so the
/// result stays monotone. Endpoints are left untouched.
pub fn apply_update(pi: &[f64], g: &[f64], eta: f64, total: f64) -> Vec<f64> {
    assert_eq!(pi.len(), g.len());
    let k = pi.len() - 1;
    let mut out = pi.to_vec();
    if k < 2 {
        return out;
    }
    for j in 1..k {
        // fused, one rounding
        out[j] = (-eta).mul_add(g[j], pi[j]).clamp(0.0, total);
    }
    out[1..k].sort_by(f64::total_cmp);
    out
}

/// `apply_update(pi, subgradient(r), eta, total)` without rounding `g`
/// first: each interior value is `(k * pi - eta * k * g) / k`, so integer
/// loads and steps give correctly rounded parameters.
pub fn update_from_maxima(pi: &[f64], r: &[f64], eta: f64, total: f64) -> Vec<f64> {
    let k = r.len();
    assert_eq!(pi.len(), k + 1);
    let mut out = pi.to_vec();
    if k < 2 {
        return out;
    }
    let kf = k as f64;
    for (j, num) in (1..k).zip(numerators(r)) {
        if num != 0.0 {
            out[j] = ((-eta).mul_add(num, kf * pi[j]) / kf).clamp(0.0, total);
        }
    }
    out[1..k].sort_by(f64::total_cmp);
    out
}

/// Ratio of the spread of the group maxima to their minimum; zero when all
/// slab maxima equal the max load. Infinite when some slab maximum is zero.
pub fn optimality_gap(max_load: f64, r_hat: &[Vec<f64>]) -> f64 {
    let min = r_hat
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return f64::INFINITY;
    }
    (max_load - min) / min
}

/// Cut arrays for every dimension from the group parameters.
pub fn materialize_partition(
    pi: &[Vec<f64>],
    prefixes: &[GroupPrefix],
    spec: &ConstraintSpec,
) -> Partition {
    let mut cuts = vec![Vec::new(); spec.ndims()];
    for ((g, p), f) in spec.groups().iter().zip(pi).zip(prefixes) {
        let c = f.materialize(p);
        for &i in g {
            cuts[i] = c.clone();
        }
    }
    Partition::new(cuts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::toy_matrix;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn subgradient_examples() {
        assert!(close(
            &subgradient(&[5.0, 2.0, 3.0]),
            &[0.0, 5.0 / 3.0, 1.0 / 3.0, 0.0]
        ));
        assert!(close(
            &subgradient(&[5.0, 2.0, 5.0]),
            &[0.0, 1.0, -1.0, 0.0]
        ));
        assert!(close(
            &subgradient(&[2.0, 2.0, 5.0]),
            &[0.0, -1.0, -2.0, 0.0]
        ));
        assert_eq!(subgradient(&[4.0; 5]), vec![0.0; 6]);
        assert_eq!(subgradient(&[7.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn group_maxima_examples() {
        let r = vec![vec![5.0, 2.0, 3.0], vec![2.0, 2.0, 5.0]];
        let both = ConstraintSpec::all_equal(&[3, 3]).unwrap();
        assert_eq!(group_maxima(&r, &both).unwrap(), vec![vec![5.0, 2.0, 5.0]]);
        let free = ConstraintSpec::unconstrained(&[3, 3]).unwrap();
        assert_eq!(group_maxima(&r, &free).unwrap(), r);
        let same = vec![vec![1.0, 2.0]; 3];
        let all = ConstraintSpec::all_equal(&[2, 2, 2]).unwrap();
        assert_eq!(group_maxima(&same, &all).unwrap(), vec![vec![1.0, 2.0]]);
        let ragged = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(group_maxima(&ragged, &both).is_err());
    }

    #[test]
    fn step_sizes() {
        let cfg = OptimizerConfig::default();
        assert!((step_size(0, 3, &cfg) - 0.1).abs() < 1e-15);
        assert!((step_size(300, 3, &cfg) - 1.0 / 200f64.sqrt()).abs() < 1e-15);
        for t in 0..1000 {
            assert!(step_size(t + 3, 3, &cfg) < step_size(t, 3, &cfg));
        }
    }

    #[test]
    fn update_examples() {
        let out = apply_update(
            &[0.0, 9.0, 11.0, 15.0],
            &[0.0, 5.0 / 3.0, 1.0 / 3.0, 0.0],
            2.0,
            15.0,
        );
        assert!(close(&out, &[0.0, 17.0 / 3.0, 31.0 / 3.0, 15.0]));
        let out = apply_update(&[0.0, 6.0, 9.0, 15.0], &[0.0, 1.0, -1.0, 0.0], 2.0, 15.0);
        assert_eq!(out, vec![0.0, 4.0, 11.0, 15.0]);
        let pi = [0.0, 3.0, 4.5, 15.0];
        assert_eq!(apply_update(&pi, &[0.0; 4], 5.0, 15.0), pi.to_vec());
    }

    #[test]
    fn update_repairs_order_and_range() {
        let out = apply_update(&[0.0, 1.0, 2.0, 10.0], &[0.0, -20.0, 30.0, 0.0], 1.0, 10.0);
        assert_eq!(out, vec![0.0, 0.0, 10.0, 10.0]);
        let out = apply_update(&[0.0, 4.0, 5.0, 10.0], &[0.0, -3.0, 3.0, 0.0], 1.0, 10.0);
        assert_eq!(out, vec![0.0, 2.0, 7.0, 10.0]);
    }

    #[test]
    fn gap_examples() {
        assert_eq!(optimality_gap(3.0, &[vec![3.0, 3.0], vec![3.0]]), 0.0);
        assert_eq!(optimality_gap(5.0, &[vec![5.0, 2.0, 5.0]]), 1.5);
        assert_eq!(optimality_gap(5.0, &[vec![5.0, 0.0]]), f64::INFINITY);
    }

    #[test]
    fn group_prefix_worked_example() {
        let t = toy_matrix();
        let (f1, f2) = (t.dim_prefix(0).unwrap(), t.dim_prefix(1).unwrap());
        let fhat = GroupPrefix::average(&[&f1, &f2]).unwrap();
        assert_eq!(
            fhat.values(),
            &[0.0, 3.5, 6.0, 7.5, 9.0, 10.0, 10.5, 13.5, 15.0]
        );
        assert_eq!(fhat.parametrize(&[0, 2, 4, 8]), vec![0.0, 6.0, 9.0, 15.0]);
        assert_eq!(fhat.materialize(&[0.0, 4.0, 11.0, 15.0]), vec![0, 1, 6, 8]);
    }

    #[test]
    fn materialize_degenerate() {
        let uniform = GroupPrefix {
            values: (0..=12).map(f64::from).collect(),
        };
        assert_eq!(
            uniform.materialize(&[0.0, 3.0, 6.0, 9.0, 12.0]),
            vec![0, 3, 6, 9, 12]
        );
        assert_eq!(
            uniform.materialize(&[0.0, 5.0, 5.0, 12.0]),
            vec![0, 5, 5, 12]
        );
        // trailing zero-load slices: the last interior cut must not pass the end
        let tail = GroupPrefix {
            values: vec![0.0, 1.0, 2.0, 2.0, 2.0],
        };
        assert_eq!(tail.materialize(&[0.0, 2.0, 2.0]), vec![0, 4, 4]);
        // leading zero-load slices with pi = 0 push the cut past them
        let lead = GroupPrefix {
            values: vec![0.0, 0.0, 0.0, 1.0, 2.0],
        };
        assert_eq!(lead.materialize(&[0.0, 0.0, 2.0]), vec![0, 2, 4]);
    }

    #[test]
    fn fused_update_matches_two_step() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let k = rng.gen_range(1..7);
            let r: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..10.0)).collect();
            let mut pi: Vec<f64> = (0..=k).map(|_| rng.gen_range(0.0..50.0)).collect();
            pi[0] = 0.0;
            pi[k] = 50.0;
            pi.sort_by(f64::total_cmp);
            let eta = rng.gen_range(0.0..3.0);
            let a = apply_update(&pi, &subgradient(&r), eta, 50.0);
            let b = update_from_maxima(&pi, &r, eta, 50.0);
            assert!(
                a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9),
                "{a:?} {b:?}"
            );
        }
        let toy = update_from_maxima(&[0.0, 9.0, 11.0, 15.0], &[5.0, 2.0, 3.0], 2.0, 15.0);
        assert_eq!(toy, vec![0.0, 17.0 / 3.0, 31.0 / 3.0, 15.0]);
    }
}
