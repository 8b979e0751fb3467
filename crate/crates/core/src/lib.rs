//! Rectilinear partitioning of sparse tensors and point sets.
//!
//! A d-dimensional load distribution is cut by one monotone array per
//! dimension into a grid of tiles; the goal is to minimize the heaviest
//! tile. The crate provides
//!
//! - [`tensor`] and [`rect_index`]: load distributions, per-dimension prefix
//!   sums and an `O(log n log m)` rectangle-load index,
//! - [`problem`]: objectives built from embedded 2-D distributions
//!   (plain, symmetric, SpGEMM and triangle-counting tilings),
//! - [`sgo`]: the subgradient optimizer with equality constraints between
//!   dimensions,
//! - [`baselines`]: uniform, exact 1-D, Nicol, two-sweep, probe-a-load,
//!   4-approximation and brute force,
//! - [`io`]: Matrix Market and point-file input, preprocessing transforms,
//!   partition and result files,
//! - [`harness`]: seeded benchmark runs, medians and performance profiles.

pub mod baselines;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod io;
pub mod problem;
pub mod rect_index;
pub mod sgo;
pub mod tensor;

pub use error::{Error, Result};
pub use problem::{Evaluation, Objective, Partition, Problem, TileLoads};
pub use rect_index::RectIndex;
pub use sgo::{optimize, ConstraintSpec, InitMode, Optimizer, OptimizerConfig, RunResult};
pub use tensor::{DimPrefix, SparseTensor};
