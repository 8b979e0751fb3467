use itertools::Itertools;

use crate::error::{Error, Result};
use crate::problem::{Partition, Problem};

/// Default cap on the number of enumerated partitions.
pub const DEFAULT_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub partition: Partition,
    pub load: f64,
    pub evaluated: usize,
}

fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Parts actually enumerated for a group: at most one per slice, extra
/// parts are left empty at the end.
fn effective_parts(n: usize, k: usize) -> usize {
    k.min(n.max(1))
}

/// Number of constrained partitions without empty parts.
pub fn enumeration_count(problem: &Problem) -> f64 {
    let spec = problem.constraints();
    spec.groups()
        .iter()
        .zip(spec.parts())
        .map(|(g, &k)| {
            let n = problem.extents()[g[0]];
            binomial(n.saturating_sub(1), effective_parts(n, k) - 1)
        })
        .product()
}

/// Exhaustive global optimum over all partitions honoring the constraint
/// groups. Among optimal partitions the lexicographically smallest (in
/// group order) is returned.
///
/// Partitions with empty parts are skipped when `k <= n`: splitting a part
/// never raises any tile load, so some optimum has no empty part.
pub fn brute_force_optimal(problem: &Problem, budget: f64) -> Result<BruteForce> {
    let count = enumeration_count(problem);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let spec = problem.constraints();
    let per_group: Vec<Vec<Vec<usize>>> = spec
        .groups()
        .iter()
        .zip(spec.parts())
        .map(|(g, &k)| {
            let n = problem.extents()[g[0]];
            let m = effective_parts(n, k);
            (1..n)
                .combinations(m - 1)
                .map(|inner| {
                    let mut cuts = Vec::with_capacity(k + 1);
                    cuts.push(0);
                    cuts.extend(inner);
                    cuts.resize(k + 1, n);
                    cuts
                })
                .collect()
        })
        .collect();

    let mut best: Option<(Partition, f64)> = None;
    let mut evaluated = 0;
    for choice in per_group.iter().map(|c| c.iter()).multi_cartesian_product() {
        let mut cuts = vec![Vec::new(); problem.ndims()];
        for (g, c) in spec.groups().iter().zip(&choice) {
            for &i in g {
                cuts[i] = (*c).clone();
            }
        }
        let p = Partition::new(cuts);
        let load = problem.tile_loads(&p).max();
        evaluated += 1;
        if best.as_ref().is_none_or(|(_, b)| load < *b) {
            best = Some((p, load));
        }
    }
    let (partition, load) = best.expect("at least one partition");
    Ok(BruteForce {
        partition,
        load,
        evaluated,
    })
}
