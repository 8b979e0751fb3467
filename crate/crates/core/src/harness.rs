//! Algorithm dispatch and benchmark bookkeeping.
//!
//! Randomized algorithms run once per seed; deterministic ones run once.
//! Every `(instance, k, algorithm)` group gets a median row holding the run
//! with the lower-median load, so the reported number is always an actual
//! run that can be reproduced from its seed.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{
    brute_force_optimal, four_apx, nicol_2d, pal_symmetric, two_sweep, uniform_partition,
    FourApxConfig, DEFAULT_BUDGET,
};
use crate::error::{Error, Result};
use crate::io::{
    read_matrix_market, reorder_degree_ascending, upper_triangular, ReadOptions, ResultRow, RowKind,
};
use crate::problem::{Objective, Partition, Problem};
use crate::sgo::{optimize, OptimizerConfig, StopReason, TraceRow};
use crate::tensor::SparseTensor;

/// Step cap for the alternating 2-D baseline.
pub const NICOL_MAX_STEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Sgo,
    Uni,
    Nic,
    Pal,
    TwoSweep,
    FourApx,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Sgo,
        Algorithm::Uni,
        Algorithm::Nic,
        Algorithm::Pal,
        Algorithm::TwoSweep,
        Algorithm::FourApx,
        Algorithm::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sgo => "sgo",
            Algorithm::Uni => "uni",
            Algorithm::Nic => "nic",
            Algorithm::Pal => "pal",
            Algorithm::TwoSweep => "2swp",
            Algorithm::FourApx => "4apx",
            Algorithm::Brute => "brute",
        }
    }

    pub fn is_randomized(self) -> bool {
        self == Algorithm::Sgo
    }

    pub fn supports(self, objective: Objective) -> bool {
        match self {
            Algorithm::Sgo | Algorithm::Uni | Algorithm::Brute => true,
            Algorithm::Nic | Algorithm::TwoSweep | Algorithm::FourApx => {
                objective == Objective::Rpp2d
            }
            Algorithm::Pal => objective == Objective::Srpp2d,
        }
    }

    /// Human-readable list of the valid algorithm/objective pairs.
    pub fn compatibility() -> String {
        [
            Objective::Rpp2d,
            Objective::Srpp2d,
            Objective::Spgemm3d,
            Objective::Tri3d,
        ]
        .iter()
        .map(|&o| {
            let algs: Vec<_> = Algorithm::ALL
                .iter()
                .filter(|a| a.supports(o))
                .map(|a| a.name())
                .collect();
            format!("{o}: {}", algs.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
    }

    pub fn check(self, objective: Objective) -> Result<()> {
        if self.supports(objective) {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "algorithm {self} cannot solve {objective}; valid combinations are {}",
                Algorithm::compatibility()
            )))
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

/// Result of one algorithm run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub partition: Partition,
    pub load: f64,
    pub normalized_load: Option<f64>,
    pub iterations: usize,
    pub trace: Option<Vec<TraceRow>>,
    /// Why the optimizer stopped; `None` for the other algorithms.
    pub stop: Option<StopReason>,
}

/// Runs `algorithm` on `problem`. Only the optimizer reads `config`.
pub fn run_algorithm(
    problem: &Problem,
    algorithm: Algorithm,
    config: &OptimizerConfig,
) -> Result<Outcome> {
    algorithm.check(problem.objective())?;
    let k = problem.parts();
    let single = || problem.terms()[0].index.as_ref();
    let mut stop = None;
    let (partition, iterations, trace) = match algorithm {
        Algorithm::Sgo => {
            let r = optimize(problem, config)?;
            stop = Some(r.stop);
            (r.partition, r.iterations, Some(r.trace))
        }
        Algorithm::Uni => (
            Partition::new(
                problem
                    .extents()
                    .iter()
                    .zip(k)
                    .map(|(&n, &k)| uniform_partition(n, k))
                    .collect(),
            ),
            0,
            None,
        ),
        Algorithm::Nic => {
            let r = nicol_2d(single(), (k[0], k[1]), NICOL_MAX_STEPS);
            (Partition::new(vec![r.rows, r.cols]), 0, None)
        }
        Algorithm::TwoSweep => {
            let r = two_sweep(single(), (k[0], k[1]));
            (Partition::new(vec![r.rows, r.cols]), 0, None)
        }
        Algorithm::FourApx => {
            let r = four_apx(single(), (k[0], k[1]), &FourApxConfig::default());
            (
                Partition::new(vec![r.partition.rows, r.partition.cols]),
                0,
                None,
            )
        }
        Algorithm::Pal => {
            let (cuts, _) = pal_symmetric(single(), k[0]);
            (Partition::new(vec![cuts.clone(), cuts]), 0, None)
        }
        Algorithm::Brute => {
            let r = brute_force_optimal(problem, DEFAULT_BUDGET)?;
            (r.partition, r.evaluated, None)
        }
    };
    let load = problem.evaluate(&partition)?.max_load;
    let normalized_load = problem.normalized_load(&partition).ok();
    Ok(Outcome {
        partition,
        load,
        normalized_load,
        iterations,
        trace,
        stop,
    })
}

/// Builds the problem for `objective` from its input tensors.
pub fn build_problem(
    objective: Objective,
    inputs: &[Arc<SparseTensor>],
    k: &[usize],
) -> Result<Problem> {
    if inputs.len() != objective.arity() {
        return Err(Error::Config(format!(
            "{objective} needs {} input matrices, got {}",
            objective.arity(),
            inputs.len()
        )));
    }
    let dims = objective
        .ndims()
        .ok_or_else(|| Error::Config("custom objectives have no builder".into()))?;
    let k = broadcast_parts(k, dims)?;
    match objective {
        Objective::Rpp2d => Problem::rpp2d(&inputs[0], k[0], k[1]),
        Objective::Srpp2d => {
            if k[0] != k[1] {
                return Err(Error::Config("symmetric partitioning needs equal k".into()));
            }
            Problem::srpp2d(&inputs[0], k[0])
        }
        Objective::Spgemm3d => Problem::spgemm3d(&inputs[0], &inputs[1], [k[0], k[1], k[2]]),
        Objective::Tri3d => {
            if k.iter().any(|&x| x != k[0]) {
                return Err(Error::Config("triangle tasks need equal k".into()));
            }
            Problem::tri3d(&inputs[0], k[0])
        }
        Objective::Custom => unreachable!(),
    }
}

/// Expands a single part count to every dimension.
pub fn broadcast_parts(k: &[usize], dims: usize) -> Result<Vec<usize>> {
    match k.len() {
        1 => Ok(vec![k[0]; dims]),
        n if n == dims => Ok(k.to_vec()),
        n => Err(Error::Config(format!(
            "got {n} part counts for a {dims}-dimensional objective"
        ))),
    }
}

pub fn format_parts(k: &[usize]) -> String {
    k.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

/// A loaded, preprocessed benchmark input.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub inputs: Vec<Arc<SparseTensor>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Reorder {
    #[default]
    None,
    DegreeAscending,
}

impl FromStr for Reorder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Reorder::None),
            "degree-asc" => Ok(Reorder::DegreeAscending),
            _ => Err(Error::Config(format!("unknown reordering {s:?}"))),
        }
    }
}

/// How matrices are read and transformed before partitioning.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Preprocess {
    pub weighted: bool,
    pub reorder: Reorder,
    pub upper_triangular: bool,
}

impl Preprocess {
    /// Reorders first, then drops the lower triangle.
    pub fn apply(&self, mut t: SparseTensor) -> Result<SparseTensor> {
        if self.reorder == Reorder::DegreeAscending {
            t = reorder_degree_ascending(&t)?.0;
        }
        if self.upper_triangular {
            t = upper_triangular(&t, false)?;
        }
        Ok(t)
    }

    pub fn load(&self, path: &Path) -> Result<SparseTensor> {
        let t = read_matrix_market(
            path,
            ReadOptions {
                weighted: self.weighted,
            },
        )?;
        self.apply(t)
    }
}

impl Instance {
    /// Loads an instance. For two-input objectives `spec` is `A.mtx:B.mtx`;
    /// a single path is used for both inputs.
    pub fn load(spec: &str, objective: Objective, prep: &Preprocess) -> Result<Instance> {
        let paths: Vec<&str> = if objective.arity() == 2 {
            match spec.split_once(':') {
                Some((a, b)) => vec![a, b],
                None => vec![spec, spec],
            }
        } else {
            vec![spec]
        };
        let mut inputs: Vec<Arc<SparseTensor>> = Vec::new();
        for (i, p) in paths.iter().enumerate() {
            if i > 0 && *p == paths[0] {
                inputs.push(inputs[0].clone());
            } else {
                inputs.push(Arc::new(prep.load(Path::new(p))?));
            }
        }
        let mut names: Vec<String> = paths
            .iter()
            .map(|p| {
                Path::new(p)
                    .file_stem()
                    .map_or_else(|| p.to_string(), |s| s.to_string_lossy().into_owned())
            })
            .collect();
        names.dedup();
        Ok(Instance {
            name: names.join(":"),
            inputs,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub objective: Objective,
    pub algorithms: Vec<Algorithm>,
    pub parts: Vec<Vec<usize>>,
    pub seeds: Vec<u64>,
    pub config: OptimizerConfig,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        for a in &self.algorithms {
            a.check(self.objective)?;
        }
        if self.seeds.is_empty() && self.algorithms.iter().any(|a| a.is_randomized()) {
            return Err(Error::Config(
                "randomized algorithms need at least one seed".into(),
            ));
        }
        Ok(())
    }
}

struct Job<'a> {
    instance: &'a Instance,
    algorithm: Algorithm,
    parts: &'a [usize],
    seed: Option<u64>,
}

fn run_job(spec: &BenchSpec, job: &Job<'_>) -> ResultRow {
    let mut row = ResultRow {
        instance: job.instance.name.clone(),
        objective: spec.objective.name().to_string(),
        algorithm: job.algorithm.name().to_string(),
        k: format_parts(job.parts),
        seed: job.seed,
        kind: RowKind::Raw,
        status: "ok".into(),
        ..Default::default()
    };
    let start = Instant::now();
    let problem = build_problem(spec.objective, &job.instance.inputs, job.parts);
    row.build_secs = start.elapsed().as_secs_f64();
    let outcome = problem.and_then(|p| {
        let config = OptimizerConfig {
            seed: job.seed.unwrap_or(spec.config.seed),
            ..spec.config.clone()
        };
        let start = Instant::now();
        let out = run_algorithm(&p, job.algorithm, &config);
        row.partition_secs = start.elapsed().as_secs_f64();
        out
    });
    row.wall_secs = row.build_secs + row.partition_secs;
    match outcome {
        Ok(o) => {
            log::info!(
                "{} {} {} seed {:?}: load {} in {:.3}s",
                row.instance,
                row.algorithm,
                row.k,
                row.seed,
                o.load,
                row.wall_secs
            );
            row.load = Some(o.load);
            row.normalized_load = o.normalized_load;
            row.iterations = Some(o.iterations);
        }
        Err(e) => {
            log::warn!("{} {} {}: {e}", row.instance, row.algorithm, row.k);
            row.status = format!("failed: {e}");
        }
    }
    row
}

/// Index of the lower median of `values` under `f64::total_cmp`, ties broken
/// by position.
pub fn lower_median_index(values: &[f64]) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    Some(order[(values.len() - 1) / 2])
}

/// Runs every `(instance, k, algorithm, seed)` job and returns raw rows,
/// each group followed by its median row. Jobs run in parallel; row order
/// only depends on the inputs.
pub fn run_bench(instances: &[Instance], spec: &BenchSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let mut groups: Vec<Vec<Job<'_>>> = Vec::new();
    for instance in instances {
        for parts in &spec.parts {
            for &algorithm in &spec.algorithms {
                let seeds: Vec<Option<u64>> = if algorithm.is_randomized() {
                    spec.seeds.iter().copied().map(Some).collect()
                } else {
                    vec![None]
                };
                groups.push(
                    seeds
                        .into_iter()
                        .map(|seed| Job {
                            instance,
                            algorithm,
                            parts,
                            seed,
                        })
                        .collect(),
                );
            }
        }
    }
    let results: Vec<Vec<ResultRow>> = groups
        .par_iter()
        .map(|g| g.par_iter().map(|job| run_job(spec, job)).collect())
        .collect();

    let mut rows = Vec::new();
    for raw in results {
        let ok: Vec<&ResultRow> = raw.iter().filter(|r| r.load.is_some()).collect();
        let loads: Vec<f64> = ok.iter().map(|r| r.load.unwrap()).collect();
        let group_wall: f64 = raw.iter().map(|r| r.wall_secs).sum();
        let mut median = match lower_median_index(&loads) {
            Some(i) => ResultRow {
                kind: RowKind::Median,
                ..ok[i].clone()
            },
            None => ResultRow {
                kind: RowKind::Median,
                status: "failed: no successful runs".into(),
                seed: None,
                load: None,
                normalized_load: None,
                iterations: None,
                ..raw[0].clone()
            },
        };
        median.group_wall_secs = Some(group_wall);
        rows.extend(raw);
        rows.push(median);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Load,
    Time,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "load" => Ok(Metric::Load),
            "time" => Ok(Metric::Time),
            _ => Err(Error::Config(format!("unknown metric {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub algorithm: String,
    pub ratio: f64,
    pub fraction: f64,
}

/// Performance profile of every algorithm in `rows`.
///
/// Uses median rows when present, raw rows otherwise. Instances are keyed by
/// `(instance, objective, k)`; an instance missing a value for any
/// algorithm is dropped and reported in the second return value. For each
/// algorithm the output holds step points `(ratio, fraction)`: the fraction
/// of instances on which its metric is within `ratio` of the best.
pub fn performance_profile(rows: &[ResultRow], metric: Metric) -> (Vec<ProfilePoint>, Vec<String>) {
    let use_median = rows.iter().any(|r| r.kind == RowKind::Median);
    let selected = rows
        .iter()
        .filter(|r| (r.kind == RowKind::Median) == use_median);

    let mut algorithms: Vec<String> = Vec::new();
    let mut table: BTreeMap<(String, String, String), BTreeMap<String, Option<f64>>> =
        BTreeMap::new();
    for r in selected {
        if !algorithms.contains(&r.algorithm) {
            algorithms.push(r.algorithm.clone());
        }
        let value = match metric {
            Metric::Load => r.load,
            Metric::Time => r.load.map(|_| r.wall_secs),
        };
        let cell = table
            .entry((r.instance.clone(), r.objective.clone(), r.k.clone()))
            .or_default()
            .entry(r.algorithm.clone())
            .or_insert(value);
        // raw rows of a randomized run: keep the best value
        if let (Some(c), Some(v)) = (*cell, value) {
            *cell = Some(c.min(v));
        }
    }

    let mut dropped = Vec::new();
    let mut ratios: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut kept = 0usize;
    for ((inst, obj, k), cells) in &table {
        let values: Option<Vec<f64>> = algorithms
            .iter()
            .map(|a| cells.get(a).copied().flatten())
            .collect();
        let Some(values) = values else {
            log::warn!("dropping {inst} {obj} {k}: missing results");
            dropped.push(format!("{inst}/{obj}/{k}"));
            continue;
        };
        kept += 1;
        let best = values.iter().copied().fold(f64::INFINITY, f64::min);
        for (a, v) in algorithms.iter().zip(values) {
            let ratio = if v == best {
                1.0
            } else if best > 0.0 {
                v / best
            } else {
                f64::INFINITY
            };
            ratios.entry(a.as_str()).or_default().push(ratio);
        }
    }

    let mut points = Vec::new();
    for a in &algorithms {
        let Some(rs) = ratios.get_mut(a.as_str()) else {
            continue;
        };
        rs.sort_by(f64::total_cmp);
        for (i, &r) in rs.iter().enumerate() {
            if rs.get(i + 1) == Some(&r) {
                continue;
            }
            points.push(ProfilePoint {
                algorithm: a.clone(),
                ratio: r,
                fraction: (i + 1) as f64 / kept as f64,
            });
        }
    }
    (points, dropped)
}

pub fn write_profile_csv(points: &[ProfilePoint], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush().map_err(|e| Error::io(path.as_ref(), e))
}

pub fn write_trace_csv(trace: &[TraceRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    for row in trace {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path.as_ref(), e))
}
