//! Weighted point sets mapped to rank space.
//!
//! Point files hold one point per line: `d` coordinates separated by
//! whitespace or commas, optionally followed by a weight. Each dimension's
//! coordinates are replaced by their rank (ties broken by input order), so
//! a set of `n` points becomes a tensor with extent `n` in every dimension.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::tensor::SparseTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    d: usize,
    coords: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// Per dimension, point ids in rank order.
    order: Vec<Vec<usize>>,
}

impl PointSet {
    pub fn new(d: usize, coords: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        assert_eq!(coords.len(), weights.len());
        for (n, (c, &w)) in coords.iter().zip(&weights).enumerate() {
            if c.len() != d {
                return Err(Error::Arity {
                    entry: n,
                    got: c.len(),
                    expected: d,
                });
            }
            if w.is_nan() || w < 0.0 {
                return Err(Error::NegativeWeight {
                    entry: n,
                    weight: w,
                });
            }
        }
        let order = (0..d)
            .map(|dim| {
                let mut ids: Vec<usize> = (0..coords.len()).collect();
                ids.sort_by(|&a, &b| coords[a][dim].total_cmp(&coords[b][dim]).then(a.cmp(&b)));
                ids
            })
            .collect();
        Ok(PointSet {
            d,
            coords,
            weights,
            order,
        })
    }

    pub fn ndims(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Rank of every point along `dim`.
    pub fn ranks(&self, dim: usize) -> Vec<usize> {
        let mut r = vec![0; self.len()];
        for (rank, &id) in self.order[dim].iter().enumerate() {
            r[id] = rank;
        }
        r
    }

    /// Coordinate at a rank-space cut: the coordinate of the first point on
    /// the upper side, or `+inf` for a cut past the last point.
    pub fn boundary_coordinate(&self, dim: usize, rank: usize) -> f64 {
        self.order[dim]
            .get(rank)
            .map_or(f64::INFINITY, |&id| self.coords[id][dim])
    }

    /// The point set as a tensor over rank space.
    pub fn to_tensor(&self) -> Result<SparseTensor> {
        let ranks: Vec<Vec<usize>> = (0..self.d).map(|dim| self.ranks(dim)).collect();
        SparseTensor::new(
            vec![self.len(); self.d],
            (0..self.len()).map(|p| (ranks.iter().map(|r| r[p]).collect(), self.weights[p])),
        )
    }
}

/// Reads a point file. With `dims` unset every field is a coordinate;
/// otherwise lines may carry one extra field used as the weight.
pub fn read_points(path: impl AsRef<Path>, dims: Option<usize>) -> Result<PointSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_points(BufReader::new(file), path, dims)
}

pub fn parse_points<R: BufRead>(reader: R, origin: &Path, dims: Option<usize>) -> Result<PointSet> {
    let err = |line: usize, msg: String| Error::Parse {
        path: PathBuf::from(origin),
        line,
        msg,
    };
    let mut d = dims;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let lineno = n + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let values = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| err(lineno, format!("non-numeric field {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let dd = *d.get_or_insert(values.len());
        let (c, w) = if values.len() == dd {
            (values, 1.0)
        } else if dims.is_some() && values.len() == dd + 1 {
            let w = values[dd];
            (values[..dd].to_vec(), w)
        } else {
            return Err(err(
                lineno,
                format!("expected {dd} coordinates, got {} fields", values.len()),
            ));
        };
        if w.is_nan() || w < 0.0 {
            return Err(err(lineno, format!("negative weight {w}")));
        }
        coords.push(c);
        weights.push(w);
    }
    PointSet::new(d.unwrap_or(0), coords, weights)
}

/// Converts a point set to a rank-space tensor.
pub fn points_to_tensor(points: &PointSet) -> Result<SparseTensor> {
    points.to_tensor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::optimal_1d;
    use std::io::Cursor;

    fn parse(text: &str, dims: Option<usize>) -> Result<PointSet> {
        parse_points(Cursor::new(text), Path::new("pts"), dims)
    }

    #[test]
    fn collinear_points() {
        let ps = parse("0.5\n-1\n3\n", None).unwrap();
        assert_eq!(ps.ranks(0), vec![1, 0, 2]);
        let t = ps.to_tensor().unwrap();
        let (cuts, b) = optimal_1d(&t.dim_prefix(0).unwrap(), 3);
        assert_eq!(b, 1.0);
        assert_eq!(cuts, vec![0, 1, 2, 3]);
        assert_eq!(ps.boundary_coordinate(0, 1), 0.5);
        assert_eq!(ps.boundary_coordinate(0, 3), f64::INFINITY);
    }

    #[test]
    fn ties_keep_input_order() {
        let ps = parse("1,2\n1,0\n0,2\n", None).unwrap();
        assert_eq!(ps.ranks(0), vec![1, 2, 0]);
        assert_eq!(ps.ranks(1), vec![1, 0, 2]);
        let t = ps.to_tensor().unwrap();
        assert_eq!(t.dims(), &[3, 3]);
        assert_eq!(t.total_load(), 3.0);
    }

    #[test]
    fn weights_and_errors() {
        let ps = parse("0 0 2.5\n1 1 0.5\n", Some(2)).unwrap();
        assert_eq!(ps.weights(), &[2.5, 0.5]);
        assert_eq!(ps.to_tensor().unwrap().total_load(), 3.0);
        assert!(matches!(
            parse("0 0\n1\n", None),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse("0 a\n", None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse("0 0 -1\n", Some(2)).is_err());
    }
}
