//! Partition files and result tables.
//!
//! A partition file is line-oriented `key value...` text:
//!
//! ```text
//! sgpart-partition 1
//! objective rpp2d
//! algorithm sgo
//! d 2
//! k 3 3
//! cuts 0 0 1 2 8
//! cuts 1 0 3 6 8
//! load 2
//! normalized_load 1.2
//! seed 7
//! iterations 1
//! ```
//!
//! `seed` is `-` for deterministic algorithms. Floats are written in their
//! shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Partition;

pub const PARTITION_MAGIC: &str = "sgpart-partition";
pub const PARTITION_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionRecord {
    pub objective: String,
    pub algorithm: String,
    pub partition: Partition,
    pub load: f64,
    pub normalized_load: f64,
    pub seed: Option<u64>,
    pub iterations: usize,
}

impl PartitionRecord {
    pub fn to_text(&self) -> String {
        let p = &self.partition;
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let _ = writeln!(s, "{PARTITION_MAGIC} {PARTITION_VERSION}");
        let _ = writeln!(s, "objective {}", self.objective);
        let _ = writeln!(s, "algorithm {}", self.algorithm);
        let _ = writeln!(s, "d {}", p.ndims());
        let _ = writeln!(s, "k {}", join(&p.parts()));
        for (i, c) in p.cuts().iter().enumerate() {
            let _ = writeln!(s, "cuts {i} {}", join(c));
        }
        let _ = writeln!(s, "load {}", self.load);
        let _ = writeln!(s, "normalized_load {}", self.normalized_load);
        match self.seed {
            Some(seed) => {
                let _ = writeln!(s, "seed {seed}");
            }
            None => s.push_str("seed -\n"),
        }
        let _ = writeln!(s, "iterations {}", self.iterations);
        s
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: PathBuf::from(origin),
            line,
            msg,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines
            .next()
            .map(|(_, l)| l.split_whitespace().collect::<Vec<_>>())
        {
            Some(h) if h.len() == 2 && h[0] == PARTITION_MAGIC => {
                if h[1] != PARTITION_VERSION.to_string() {
                    return Err(Error::Unsupported(format!(
                        "partition file version {}",
                        h[1]
                    )));
                }
            }
            _ => return Err(err(1, "not a partition file".into())),
        }

        let mut objective = None;
        let mut algorithm = None;
        let mut d = None;
        let mut k: Option<Vec<usize>> = None;
        let mut cuts: Vec<Option<Vec<usize>>> = Vec::new();
        let mut load = None;
        let mut normalized = None;
        let mut seed = None;
        let mut iterations = None;
        for (n, line) in lines {
            let lineno = n + 1;
            let mut it = line.split_whitespace();
            let key = it.next().unwrap_or_default();
            let rest: Vec<&str> = it.collect();
            let ints = |v: &[&str]| -> Result<Vec<usize>> {
                v.iter()
                    .map(|s| {
                        s.parse()
                            .map_err(|_| err(lineno, format!("bad integer {s:?}")))
                    })
                    .collect()
            };
            let one = |v: &[&str]| -> Result<String> {
                match v {
                    [x] => Ok(x.to_string()),
                    _ => Err(err(lineno, format!("{key} takes one value"))),
                }
            };
            let float = |v: &[&str]| -> Result<f64> {
                one(v)?
                    .parse()
                    .map_err(|_| err(lineno, format!("bad number for {key}")))
            };
            match key {
                "objective" => objective = Some(one(&rest)?),
                "algorithm" => algorithm = Some(one(&rest)?),
                "d" => {
                    let dd = ints(&rest)?;
                    if dd.len() != 1 {
                        return Err(err(lineno, "d takes one value".into()));
                    }
                    cuts = vec![None; dd[0]];
                    d = Some(dd[0]);
                }
                "k" => k = Some(ints(&rest)?),
                "cuts" => {
                    let v = ints(&rest)?;
                    let (&dim, c) = v
                        .split_first()
                        .ok_or_else(|| err(lineno, "cuts needs a dimension".into()))?;
                    let slot = cuts
                        .get_mut(dim)
                        .ok_or_else(|| err(lineno, format!("dimension {dim} out of range")))?;
                    *slot = Some(c.to_vec());
                }
                "load" => load = Some(float(&rest)?),
                "normalized_load" => normalized = Some(float(&rest)?),
                "seed" => {
                    let s = one(&rest)?;
                    seed = Some(if s == "-" {
                        None
                    } else {
                        Some(s.parse().map_err(|_| err(lineno, "bad seed".into()))?)
                    })
                }
                "iterations" => iterations = Some(ints(&rest)?.first().copied().unwrap_or(0)),
                other => return Err(err(lineno, format!("unknown key {other:?}"))),
            }
        }
        let missing = |what: &str| err(0, format!("missing {what}"));
        let d = d.ok_or_else(|| missing("d"))?;
        let k = k.ok_or_else(|| missing("k"))?;
        let cuts: Vec<Vec<usize>> = cuts
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| missing(&format!("cuts for dimension {i}"))))
            .collect::<Result<_>>()?;
        let partition = Partition::new(cuts);
        if k.len() != d || partition.parts() != k {
            return Err(err(0, "k does not match the cut arrays".into()));
        }
        Ok(PartitionRecord {
            objective: objective.ok_or_else(|| missing("objective"))?,
            algorithm: algorithm.ok_or_else(|| missing("algorithm"))?,
            partition,
            load: load.ok_or_else(|| missing("load"))?,
            normalized_load: normalized.ok_or_else(|| missing("normalized_load"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            iterations: iterations.ok_or_else(|| missing("iterations"))?,
        })
    }
}

pub fn write_partition(record: &PartitionRecord, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, record.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<PartitionRecord> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    PartitionRecord::parse(&text, path)
}

/// Row kind in a results table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    #[default]
    Raw,
    Median,
}

/// One line of a benchmark results table. Timing columns come last.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub objective: String,
    pub algorithm: String,
    /// Part counts joined with `x`, e.g. `8x8`.
    pub k: String,
    pub seed: Option<u64>,
    pub kind: RowKind,
    /// `ok` or the error message of a failed run.
    pub status: String,
    pub load: Option<f64>,
    pub normalized_load: Option<f64>,
    pub iterations: Option<usize>,
    pub build_secs: f64,
    pub partition_secs: f64,
    pub wall_secs: f64,
    /// Median rows only: summed wall time of every run in the group.
    pub group_wall_secs: Option<f64>,
}

/// Names of the columns that hold wall-clock measurements.
pub const TIMING_COLUMNS: [&str; 4] = [
    "build_secs",
    "partition_secs",
    "wall_secs",
    "group_wall_secs",
];

pub fn write_results_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
