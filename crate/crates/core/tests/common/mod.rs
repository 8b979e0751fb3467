//! Random inputs shared by the integration tests.
#![allow(dead_code)]

use rand::seq::index::sample;
use rand::Rng;
use sgpart::SparseTensor;

/// `rows x cols` pattern matrix with exactly `round(density * rows * cols)`
/// nonzeros, capped at `max_nnz`.
pub fn random_pattern<R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    density: f64,
    max_nnz: usize,
) -> SparseTensor {
    let cells = rows * cols;
    let nnz = ((density * cells as f64).round() as usize)
        .min(max_nnz)
        .min(cells);
    let picks = sample(rng, cells, nnz);
    SparseTensor::from_pattern(
        vec![rows, cols],
        picks.into_iter().map(|c| vec![c / cols, c % cols]),
    )
    .unwrap()
}

/// Same as [`random_pattern`] with small integer weights.
pub fn random_weighted<R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    density: f64,
) -> SparseTensor {
    let pattern = random_pattern(rng, rows, cols, density, usize::MAX);
    let entries: Vec<(Vec<usize>, f64)> = pattern
        .entries()
        .map(|(ix, _)| (ix.to_vec(), rng.gen_range(1..=9) as f64))
        .collect();
    SparseTensor::new(vec![rows, cols], entries).unwrap()
}

/// Checks a finished run's trace: best load never increases, and the last row
/// satisfies the recorded stop rule. `window` is the patience window.
pub fn check_trace(
    run: &sgpart::RunResult,
    config: &sgpart::OptimizerConfig,
    window: usize,
) -> Result<(), String> {
    use sgpart::sgo::StopReason;
    let trace = &run.trace;
    let last = trace.last().ok_or("empty trace")?;
    if trace.windows(2).any(|w| w[1].best_load > w[0].best_load) {
        return Err("best load increased".into());
    }
    if run.iterations > config.max_iters || last.t != run.iterations {
        return Err(format!(
            "ran {} iterations, cap {}",
            run.iterations, config.max_iters
        ));
    }
    if last.best_load != run.load {
        return Err(format!(
            "reported {} but best was {}",
            run.load, last.best_load
        ));
    }
    // replay the patience anchor
    let mut anchor = f64::INFINITY;
    let mut since = 0;
    for row in trace {
        if row.load < anchor / (1.0 + config.eps) {
            anchor = row.load;
            since = row.t;
        }
    }
    let ok = match run.stop {
        StopReason::Converged => last.gap < config.eps,
        StopReason::Patience => last.t - since >= window,
        StopReason::MaxIters => last.t == config.max_iters,
        StopReason::Degenerate => run.degenerate,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("stop {:?} not justified by the trace", run.stop))
    }
}
