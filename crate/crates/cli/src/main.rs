//! `sgpart`: partition sparse matrices and benchmark partitioners.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use sgpart::fixtures::toy_matrix;
use sgpart::harness::{
    build_problem, format_parts, performance_profile, run_algorithm, run_bench, write_profile_csv,
    write_trace_csv, Algorithm, BenchSpec, Instance, Metric, Preprocess, Reorder,
};
use sgpart::io::{
    read_points, read_results_csv, write_matrix_market, write_partition, write_results_csv,
    PartitionRecord,
};
use sgpart::{InitMode, Objective, OptimizerConfig};

#[derive(Parser)]
#[command(
    name = "sgpart",
    version,
    about = "Rectilinear partitioning of sparse matrices and tensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition one instance and write a partition file.
    Partition(PartitionArgs),
    /// Run algorithms over instances and seeds, write a results CSV.
    Bench(BenchArgs),
    /// Turn a results CSV into performance-profile step points.
    Profile(ProfileArgs),
    /// Run the optimizer and write its per-iteration trace.
    Trace(TraceArgs),
    /// Write the 8x8 toy matrix as a Matrix Market file.
    Fixture {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Matrix Market file (the A input).
    #[arg(long, required_unless_present = "points", conflicts_with = "points")]
    input: Option<PathBuf>,
    /// Second matrix for spgemm3d.
    #[arg(long)]
    input_b: Option<PathBuf>,
    /// Point file, mapped to rank space (2-D objectives only).
    #[arg(long)]
    points: Option<PathBuf>,
    /// Coordinates per point; a trailing extra field is then read as weight.
    #[arg(long, requires = "points")]
    point_dims: Option<usize>,
    #[command(flatten)]
    prep: PrepArgs,
}

#[derive(Args)]
struct PrepArgs {
    /// Use matrix values (absolute) as weights instead of counting nonzeros.
    #[arg(long)]
    weighted: bool,
    /// Symmetric reordering applied to square inputs.
    #[arg(long, default_value = "none", value_parser = ["none", "degree-asc"])]
    reorder: String,
    /// Keep only entries strictly above the diagonal.
    #[arg(long)]
    upper_triangular: bool,
}

impl PrepArgs {
    fn preprocess(&self) -> Result<Preprocess> {
        Ok(Preprocess {
            weighted: self.weighted,
            reorder: self.reorder.parse::<Reorder>()?,
            upper_triangular: self.upper_triangular,
        })
    }
}

#[derive(Args)]
struct SgoArgs {
    /// Stop once the optimality gap drops below this.
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Patience window multiplier on the number of free cuts.
    #[arg(long = "patience-c", default_value_t = 10.0)]
    patience_c: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Step size offset.
    #[arg(long = "T", default_value_t = 100.0)]
    t_offset: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    #[arg(long, default_value = "rand", value_parser = ["det", "rand"])]
    init: String,
}

impl SgoArgs {
    fn config(&self, seed: u64) -> Result<OptimizerConfig> {
        let config = OptimizerConfig {
            mu: self.mu,
            offset: self.t_offset,
            eps: self.eps,
            patience: self.patience_c,
            max_iters: self.max_iters,
            seed,
            init: self.init.parse::<InitMode>()?,
            forced_step: None,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    objective: Objective,
    #[arg(long, default_value = "sgo")]
    algorithm: String,
    /// Parts per dimension, comma separated; one value is broadcast.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    sgo: SgoArgs,
    /// Partition file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    objective: Objective,
    #[arg(long, default_value = "sgo")]
    algorithm: String,
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    sgo: SgoArgs,
    /// Trace CSV to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files; for spgemm3d use `A.mtx:B.mtx`.
    #[arg(long = "input", required = true, num_args = 1..)]
    inputs: Vec<String>,
    #[arg(long)]
    objective: Objective,
    /// Algorithms, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "sgo")]
    algorithm: Vec<String>,
    /// Part counts; repeat the flag for several, e.g. `--k 8,8 --k 16,16`.
    #[arg(long, required = true)]
    k: Vec<String>,
    /// Number of seeds per randomized run.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// First seed; runs use seed, seed+1, ...
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    prep: PrepArgs,
    #[command(flatten)]
    sgo: SgoArgs,
    /// Results CSV to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ProfileArgs {
    /// Results CSV from `bench`.
    #[arg(long)]
    results: PathBuf,
    #[arg(long, default_value = "load", value_parser = ["load", "time"])]
    metric: String,
    #[arg(long)]
    out: PathBuf,
}

fn parse_algorithm(name: &str, objective: Objective) -> Result<Algorithm> {
    let a: Algorithm = name.parse()?;
    a.check(objective)?;
    Ok(a)
}

fn parse_k(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("bad part count {v:?}"))
        })
        .collect()
}

fn load_inputs(args: &InputArgs, objective: Objective) -> Result<Instance> {
    let prep = args.prep.preprocess()?;
    if let Some(points) = &args.points {
        if objective.ndims() != Some(2) || objective.arity() != 1 {
            bail!("point input supports rpp2d and srpp2d only");
        }
        let ps = read_points(points, args.point_dims)?;
        if ps.ndims() != 2 {
            bail!(
                "{}: expected 2-D points, got {}",
                points.display(),
                ps.ndims()
            );
        }
        let t = prep.apply(ps.to_tensor()?)?;
        return Ok(Instance {
            name: stem(points),
            inputs: vec![Arc::new(t)],
        });
    }
    let a = args.input.as_ref().expect("clap enforces --input");
    if objective.arity() == 2 {
        let b = args
            .input_b
            .as_ref()
            .with_context(|| format!("{objective} needs a second matrix via --input-b"))?;
        let spec = format!("{}:{}", a.display(), b.display());
        Ok(Instance::load(&spec, objective, &prep)?)
    } else {
        if args.input_b.is_some() {
            bail!("{objective} takes a single input; drop --input-b");
        }
        Ok(Instance::load(&a.to_string_lossy(), objective, &prep)?)
    }
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(
        || p.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn cmd_partition(args: PartitionArgs) -> Result<()> {
    let algorithm = parse_algorithm(&args.algorithm, args.objective)?;
    let config = args.sgo.config(args.seed)?;
    let instance = load_inputs(&args.input, args.objective)?;
    let start = Instant::now();
    let problem = build_problem(args.objective, &instance.inputs, &args.k)?;
    let outcome = run_algorithm(&problem, algorithm, &config)?;
    let wall = start.elapsed().as_secs_f64();
    let normalized = problem.normalized_load(&outcome.partition)?;
    let record = PartitionRecord {
        objective: args.objective.name().into(),
        algorithm: algorithm.name().into(),
        partition: outcome.partition,
        load: outcome.load,
        normalized_load: normalized,
        seed: algorithm.is_randomized().then_some(args.seed),
        iterations: outcome.iterations,
    };
    write_partition(&record, &args.out)?;
    println!(
        "{} {} {} k={} load={} normalized_load={:.4} iterations={} wall_secs={:.3}",
        instance.name,
        args.objective,
        algorithm,
        format_parts(problem.parts()),
        record.load,
        normalized,
        record.iterations,
        wall
    );
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<()> {
    let algorithm = parse_algorithm(&args.algorithm, args.objective)?;
    if algorithm != Algorithm::Sgo {
        bail!("trace is only recorded for sgo, not {algorithm}");
    }
    let config = args.sgo.config(args.seed)?;
    let instance = load_inputs(&args.input, args.objective)?;
    let problem = build_problem(args.objective, &instance.inputs, &args.k)?;
    let outcome = run_algorithm(&problem, algorithm, &config)?;
    let trace = outcome.trace.unwrap_or_default();
    write_trace_csv(&trace, &args.out)?;
    println!(
        "{} rows, final load={} stop={}",
        trace.len(),
        outcome.load,
        outcome.stop.map_or("-".to_string(), |s| s.to_string())
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let algorithms = args
        .algorithm
        .iter()
        .map(|a| parse_algorithm(a, args.objective))
        .collect::<Result<Vec<_>>>()?;
    let parts = args
        .k
        .iter()
        .map(|k| parse_k(k))
        .collect::<Result<Vec<_>>>()?;
    let prep = args.prep.preprocess()?;
    let spec = BenchSpec {
        objective: args.objective,
        algorithms,
        parts,
        seeds: (args.seed..args.seed + args.seeds).collect(),
        config: args.sgo.config(args.seed)?,
    };
    let mut instances = Vec::new();
    for name in &args.inputs {
        match Instance::load(name, args.objective, &prep) {
            Ok(i) => instances.push(i),
            Err(e) => log::warn!("skipping {name}: {e}"),
        }
    }
    if instances.is_empty() {
        bail!("no readable instances");
    }
    let rows = run_bench(&instances, &spec)?;
    write_results_csv(&rows, &args.out)?;
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    println!(
        "{} rows for {} instances written to {} ({failed} failed)",
        rows.len(),
        instances.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_profile(args: ProfileArgs) -> Result<()> {
    let rows = read_results_csv(&args.results)?;
    let metric: Metric = args.metric.parse()?;
    let (points, dropped) = performance_profile(&rows, metric);
    write_profile_csv(&points, &args.out)?;
    println!(
        "{} profile points written to {} ({} instances dropped)",
        points.len(),
        args.out.display(),
        dropped.len()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Partition(a) => cmd_partition(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Profile(a) => cmd_profile(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Fixture { out } => {
            write_matrix_market(&toy_matrix(), &out)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
