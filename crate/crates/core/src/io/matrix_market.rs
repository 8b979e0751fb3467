//! Matrix Market coordinate files.
//!
//! Supports `coordinate` storage with `pattern`, `real` or `integer` fields
//! and `general`, `symmetric` or `skew-symmetric` symmetry. Indices are
//! 1-based on disk. By default values are ignored and every entry has weight
//! 1; with `weighted` the absolute value is used as the weight.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::tensor::SparseTensor;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Use entry values as weights instead of counting nonzeros.
    pub weighted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Pattern,
    Real,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// Reads a Matrix Market coordinate file into a 2-D tensor.
pub fn read_matrix_market(path: impl AsRef<Path>, opts: ReadOptions) -> Result<SparseTensor> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(BufReader::new(file), path, opts)
}

/// Parses Matrix Market text from any reader. `origin` only labels errors.
pub fn parse_matrix_market<R: BufRead>(
    reader: R,
    origin: &Path,
    opts: ReadOptions,
) -> Result<SparseTensor> {
    let err = |line: usize, msg: String| Error::Parse {
        path: PathBuf::from(origin),
        line,
        msg,
    };
    let mut lines = reader.lines().enumerate();

    let (lineno, header) = match lines.next() {
        Some((n, l)) => (n + 1, l.map_err(|e| Error::io(origin, e))?),
        None => return Err(err(1, "empty file".into())),
    };
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(lineno, format!("bad header {header:?}")));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Unsupported(format!(
            "{}: {} storage, only coordinate is supported",
            origin.display(),
            tokens[2]
        )));
    }
    let field = match tokens[3].as_str() {
        "pattern" => Field::Pattern,
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        other => {
            return Err(Error::Unsupported(format!(
                "{}: field {other}",
                origin.display()
            )))
        }
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => {
            return Err(Error::Unsupported(format!(
                "{}: symmetry {other}",
                origin.display()
            )))
        }
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut raw: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut seen = 0usize;
    for (n, line) in lines {
        let lineno = n + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let num = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| err(lineno, format!("expected an integer, got {s:?}")))
        };
        let Some((m, ncols, _)) = size else {
            if fields.len() != 3 {
                return Err(err(
                    lineno,
                    "size line needs rows, columns and entries".into(),
                ));
            }
            let s = (num(fields[0])?, num(fields[1])?, num(fields[2])?);
            raw.reserve(if symmetry == Symmetry::General {
                s.2
            } else {
                2 * s.2
            });
            size = Some(s);
            continue;
        };
        let want = if field == Field::Pattern { 2 } else { 3 };
        if fields.len() < want {
            return Err(err(
                lineno,
                format!("expected {want} fields, got {}", fields.len()),
            ));
        }
        let (i, j) = (num(fields[0])?, num(fields[1])?);
        if i == 0 || j == 0 || i > m || j > ncols {
            return Err(err(lineno, format!("index ({i}, {j}) outside {m}x{ncols}")));
        }
        let value = match field {
            Field::Pattern => 1.0,
            _ => fields[2]
                .parse::<f64>()
                .map_err(|_| err(lineno, format!("bad value {:?}", fields[2])))?,
        };
        let weight = if opts.weighted { value.abs() } else { 1.0 };
        let (r, c) = (i - 1, j - 1);
        raw.push((vec![r, c], weight));
        if symmetry != Symmetry::General && r != c {
            raw.push((vec![c, r], weight));
        }
        seen += 1;
    }
    let Some((m, ncols, nnz)) = size else {
        return Err(err(1, "missing size line".into()));
    };
    if seen != nnz {
        return Err(err(
            0,
            format!("header declares {nnz} entries, found {seen}"),
        ));
    }
    SparseTensor::new(vec![m, ncols], raw)
}

/// Writes a 2-D tensor as a general coordinate file. Unit-weight tensors are
/// written as `pattern`, anything else as `real`.
pub fn write_matrix_market(tensor: &SparseTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (m, n) = tensor.shape_2d()?;
    let pattern = tensor.weights().iter().all(|&w| w == 1.0);
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(
        w,
        "%%MatrixMarket matrix coordinate {} general",
        if pattern { "pattern" } else { "real" }
    )
    .map_err(io)?;
    writeln!(w, "{m} {n} {}", tensor.nnz()).map_err(io)?;
    for (ix, weight) in tensor.entries() {
        if pattern {
            writeln!(w, "{} {}", ix[0] + 1, ix[1] + 1).map_err(io)?;
        } else {
            writeln!(w, "{} {} {}", ix[0] + 1, ix[1] + 1, weight).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}
