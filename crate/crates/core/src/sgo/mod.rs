//! Subgradient optimizer for rectilinear partitioning.
//!
//! The optimizer keeps one monotone array of load-space parameters per
//! constraint group. Every iteration it
//!
//! 1. maps the parameters to cut arrays through the inverse group prefix,
//! 2. evaluates all tile loads and takes the slab maxima of every dimension,
//! 3. merges the slab maxima of each group element-wise,
//! 4. stops if the group maxima are close enough to uniform,
//! 5. otherwise moves the parameters against the subgradient with a
//!    diminishing step.
//!
//! The best partition seen so far is returned. Because loads of discrete
//! inputs rarely equalize exactly, a patience rule ends the run after
//! `c * sum(k)` iterations without a relative improvement above `eps`.

mod constraints;
pub mod ops;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use constraints::ConstraintSpec;
pub use ops::{
    apply_update, group_maxima, materialize_partition, optimality_gap, slab_maxima, step_size,
    subgradient, update_from_maxima, GroupPrefix,
};

use crate::error::{Error, Result};
use crate::problem::{Partition, Problem, TileLoads};

/// How the load-space parameters are seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum InitMode {
    /// Evenly spaced: `pi[j] = j * L / k`.
    #[serde(rename = "det")]
    Deterministic,
    /// Sorted uniform draws on `(0, L)`.
    #[default]
    #[serde(rename = "rand")]
    Random,
}

impl FromStr for InitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "det" | "deterministic" => Ok(InitMode::Deterministic),
            "rand" | "random" => Ok(InitMode::Random),
            _ => Err(Error::Config(format!("unknown init mode {s:?}"))),
        }
    }
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMode::Deterministic => "det",
            InitMode::Random => "rand",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Step scale.
    pub mu: f64,
    /// Step offset; the first step is `mu / sqrt(offset)`.
    pub offset: f64,
    /// Stopping tolerance for both the optimality gap and the patience rule.
    pub eps: f64,
    /// Patience factor: the window is `patience * sum(k)` iterations.
    pub patience: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub init: InitMode,
    /// Replaces the step schedule with a constant. Used to replay
    /// hand-computed iterations.
    pub forced_step: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            mu: 1.0,
            offset: 100.0,
            eps: 0.001,
            patience: 10.0,
            max_iters: 100_000,
            seed: 0,
            init: InitMode::Random,
            forced_step: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if self.mu.is_nan() || self.mu <= 0.0 {
            return bad("mu must be positive");
        }
        if self.offset.is_nan() || self.offset <= 0.0 {
            return bad("T must be positive");
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return bad("eps must be positive");
        }
        if self.patience.is_nan() || self.patience < 1.0 {
            return bad("patience factor must be >= 1");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be >= 1");
        }
        if let Some(eta) = self.forced_step {
            if eta.is_nan() || eta <= 0.0 {
                return bad("forced step must be positive");
            }
        }
        Ok(())
    }
}

/// Optimizer state: one parameter array per constraint group.
#[derive(Debug, Clone, PartialEq)]
pub struct Parametrization {
    pub pi: Vec<Vec<f64>>,
    /// Upper end of each group's load range.
    pub totals: Vec<f64>,
    pub t: usize,
    pub best_pi: Vec<Vec<f64>>,
    pub best_load: f64,
}

/// Averaged prefix of every constraint group of `problem`.
pub fn group_prefixes(problem: &Problem) -> Result<Vec<GroupPrefix>> {
    problem
        .constraints()
        .groups()
        .iter()
        .map(|g| {
            let members: Vec<_> = g.iter().map(|&i| problem.dim_prefix(i)).collect();
            GroupPrefix::average(&members)
        })
        .collect()
}

/// Initial parameters according to `config.init`.
pub fn init_parameters(problem: &Problem, config: &OptimizerConfig) -> Result<Parametrization> {
    let prefixes = group_prefixes(problem)?;
    if prefixes.iter().all(|f| f.total() <= 0.0) {
        return Err(Error::ZeroLoad);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let spec = problem.constraints();
    let mut pi = Vec::with_capacity(spec.len());
    for (f, &k) in prefixes.iter().zip(spec.parts()) {
        let total = f.total();
        let mut p = vec![0.0; k + 1];
        match config.init {
            InitMode::Deterministic => {
                for (j, v) in p.iter_mut().enumerate() {
                    *v = j as f64 * total / k as f64;
                }
            }
            InitMode::Random => {
                for v in p[1..k].iter_mut() {
                    *v = loop {
                        let x = rng.gen::<f64>() * total;
                        if x > 0.0 || total == 0.0 {
                            break x;
                        }
                    };
                }
                p[1..k].sort_by(f64::total_cmp);
            }
        }
        p[0] = 0.0;
        p[k] = total;
        pi.push(p);
    }
    Ok(Parametrization {
        totals: prefixes.iter().map(GroupPrefix::total).collect(),
        best_pi: pi.clone(),
        pi,
        t: 0,
        best_load: f64::INFINITY,
    })
}

/// Everything observed about the current parameters.
#[derive(Debug, Clone)]
pub struct Inspection {
    pub partition: Partition,
    pub tiles: TileLoads,
    pub load: f64,
    /// Slab maxima per dimension.
    pub r: Vec<Vec<f64>>,
    /// Slab maxima merged per constraint group.
    pub r_hat: Vec<Vec<f64>>,
    pub gap: f64,
}

/// One full iteration, for replaying and testing.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub before: Inspection,
    pub pi_before: Vec<Vec<f64>>,
    pub g_hat: Vec<Vec<f64>>,
    pub eta: Vec<f64>,
    pub pi_after: Vec<Vec<f64>>,
    pub partition_after: Partition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    /// Group maxima within `eps` of each other.
    #[serde(rename = "gap")]
    Converged,
    /// No relative improvement above `eps` within the patience window.
    #[serde(rename = "patience")]
    Patience,
    #[serde(rename = "max_iters")]
    MaxIters,
    /// Zero total load; a uniform partition is returned.
    #[serde(rename = "degenerate")]
    Degenerate,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Converged => "gap",
            StopReason::Patience => "patience",
            StopReason::MaxIters => "max_iters",
            StopReason::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: usize,
    pub load: f64,
    pub best_load: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub partition: Partition,
    pub load: f64,
    /// Number of parameter updates performed.
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
    pub stop: StopReason,
    pub degenerate: bool,
}

/// Stateful optimizer over one problem.
#[derive(Debug, Clone)]
pub struct Optimizer<'p> {
    problem: &'p Problem,
    config: OptimizerConfig,
    prefixes: Vec<GroupPrefix>,
    state: Parametrization,
}

impl<'p> Optimizer<'p> {
    pub fn new(problem: &'p Problem, config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        let state = init_parameters(problem, &config)?;
        let prefixes = group_prefixes(problem)?;
        Ok(Optimizer {
            problem,
            config,
            prefixes,
            state,
        })
    }

    /// Starts from an explicit cut array per dimension. Grouped dimensions
    /// must carry identical cuts.
    pub fn from_partition(
        problem: &'p Problem,
        config: OptimizerConfig,
        start: &Partition,
    ) -> Result<Self> {
        config.validate()?;
        start.validate(problem.extents(), problem.parts())?;
        let prefixes = group_prefixes(problem)?;
        let spec = problem.constraints();
        let mut pi = Vec::with_capacity(spec.len());
        for (g, f) in spec.groups().iter().zip(&prefixes) {
            let cuts = start.dim(g[0]);
            if g.iter().any(|&i| start.dim(i) != cuts) {
                return Err(Error::Partition(format!(
                    "grouped dimensions {g:?} start with different cuts"
                )));
            }
            pi.push(f.parametrize(cuts));
        }
        let state = Parametrization {
            totals: prefixes.iter().map(GroupPrefix::total).collect(),
            best_pi: pi.clone(),
            pi,
            t: 0,
            best_load: f64::INFINITY,
        };
        Ok(Optimizer {
            problem,
            config,
            prefixes,
            state,
        })
    }

    pub fn state(&self) -> &Parametrization {
        &self.state
    }

    pub fn partition(&self) -> Partition {
        materialize_partition(&self.state.pi, &self.prefixes, self.problem.constraints())
    }

    /// Evaluates the current parameters without changing them.
    pub fn inspect(&self) -> Result<Inspection> {
        let partition = self.partition();
        let tiles = self.problem.tile_loads(&partition);
        let load = tiles.max();
        let r: Vec<Vec<f64>> = (0..self.problem.ndims())
            .map(|i| slab_maxima(&tiles, i))
            .collect();
        let r_hat = group_maxima(&r, self.problem.constraints())?;
        let gap = optimality_gap(load, &r_hat);
        Ok(Inspection {
            partition,
            tiles,
            load,
            r,
            r_hat,
            gap,
        })
    }

    /// Step size of each group at the current iteration.
    fn steps(&self) -> Vec<f64> {
        self.problem
            .constraints()
            .parts()
            .iter()
            .map(|&k| {
                self.config
                    .forced_step
                    .unwrap_or_else(|| step_size(self.state.t, k, &self.config))
            })
            .collect()
    }

    /// Applies one subgradient update computed from `seen`.
    fn advance(&mut self, seen: &Inspection) -> (Vec<Vec<f64>>, Vec<f64>) {
        let g_hat: Vec<Vec<f64>> = seen.r_hat.iter().map(|r| subgradient(r)).collect();
        let eta = self.steps();
        for (((pi, r), &e), &total) in self
            .state
            .pi
            .iter_mut()
            .zip(&seen.r_hat)
            .zip(&eta)
            .zip(&self.state.totals)
        {
            *pi = update_from_maxima(pi, r, e, total);
        }
        self.state.t += 1;
        (g_hat, eta)
    }

    /// Runs exactly one iteration and reports every intermediate value.
    pub fn step(&mut self) -> Result<StepReport> {
        let before = self.inspect()?;
        let pi_before = self.state.pi.clone();
        let (g_hat, eta) = self.advance(&before);
        Ok(StepReport {
            before,
            pi_before,
            g_hat,
            eta,
            pi_after: self.state.pi.clone(),
            partition_after: self.partition(),
        })
    }

    /// Iterates until a stopping rule fires and returns the best partition.
    pub fn run(mut self) -> Result<RunResult> {
        let window = (self.config.patience
            * self.problem.constraints().parts().iter().sum::<usize>() as f64)
            .ceil() as usize;
        let eps = self.config.eps;
        let mut best: Option<Partition> = None;
        let mut anchor = f64::INFINITY;
        let mut last_improvement = 0usize;
        let mut trace = Vec::new();

        let stop = loop {
            let seen = self.inspect()?;
            let t = self.state.t;
            if seen.load < self.state.best_load {
                self.state.best_load = seen.load;
                self.state.best_pi = self.state.pi.clone();
                best = Some(seen.partition.clone());
            }
            if seen.load < anchor / (1.0 + eps) {
                anchor = seen.load;
                last_improvement = t;
            }
            trace.push(TraceRow {
                t,
                load: seen.load,
                best_load: self.state.best_load,
                gap: seen.gap,
            });
            if seen.gap < eps {
                break StopReason::Converged;
            }
            if t - last_improvement >= window {
                break StopReason::Patience;
            }
            if t >= self.config.max_iters {
                break StopReason::MaxIters;
            }
            self.advance(&seen);
        };

        let partition = best.expect("at least one evaluation");
        let load = self.problem.evaluate(&partition)?.max_load;
        log::debug!(
            "stopped on {stop} after {} iterations, best load {load}",
            self.state.t
        );
        Ok(RunResult {
            partition,
            load,
            iterations: self.state.t,
            trace,
            stop,
            degenerate: false,
        })
    }
}

/// Runs the optimizer from its configured initialization.
///
/// A problem with zero total load yields the uniform partition, flagged as
/// degenerate.
pub fn optimize(problem: &Problem, config: &OptimizerConfig) -> Result<RunResult> {
    match Optimizer::new(problem, config.clone()) {
        Ok(opt) => opt.run(),
        Err(Error::ZeroLoad) => {
            let partition = Partition::new(
                problem
                    .extents()
                    .iter()
                    .zip(problem.parts())
                    .map(|(&n, &k)| crate::baselines::uniform_partition(n, k))
                    .collect(),
            );
            let load = problem.evaluate(&partition)?.max_load;
            Ok(RunResult {
                partition,
                load,
                iterations: 0,
                trace: Vec::new(),
                stop: StopReason::Degenerate,
                degenerate: true,
            })
        }
        Err(e) => Err(e),
    }
}
