//! Sparse tensors as discrete load distributions and their per-dimension
//! prefix sums.
//!
//! A tensor with `o` nonzeros is a set of point masses at integer index
//! vectors. The prefix sum along dimension `i` counts the weight of all
//! entries whose `i`-th coordinate is below a boundary, with every other
//! coordinate unrestricted.

use crate::error::{Error, Result};

/// Coordinate-format d-dimensional tensor with non-negative weights.
///
/// Entries are stored sorted lexicographically by index vector with
/// duplicates merged and zero weights dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTensor {
    dims: Vec<usize>,
    /// Flattened index vectors, `ndims()` coordinates per entry.
    indices: Vec<usize>,
    weights: Vec<f64>,
    total_load: f64,
}

impl SparseTensor {
    /// Builds a tensor from raw `(index, weight)` pairs.
    ///
    /// Duplicate index vectors have their weights summed. Zero-weight
    /// entries (including merged ones) are dropped.
    pub fn new<I>(dims: Vec<usize>, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let d = dims.len();
        let mut entries: Vec<(Vec<usize>, f64)> = Vec::new();
        for (n, (index, weight)) in raw.into_iter().enumerate() {
            if index.len() != d {
                return Err(Error::Arity {
                    entry: n,
                    got: index.len(),
                    expected: d,
                });
            }
            if index.iter().zip(&dims).any(|(&u, &n)| u >= n) {
                return Err(Error::IndexOutOfRange {
                    entry: n,
                    index,
                    dims,
                });
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::NegativeWeight { entry: n, weight });
            }
            entries.push((index, weight));
        }
        // stable so that summation order of duplicates follows input order
        entries.sort_by(|a, b| a.0.cmp(&b.0));

        let mut indices = Vec::with_capacity(entries.len() * d);
        let mut weights: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<&[usize]> = None;
        for (index, weight) in &entries {
            if last == Some(index.as_slice()) {
                *weights.last_mut().unwrap() += weight;
            } else {
                indices.extend_from_slice(index);
                weights.push(*weight);
                last = Some(index);
            }
        }

        // drop zero weights
        let mut kept_idx = Vec::with_capacity(indices.len());
        let mut kept_w = Vec::with_capacity(weights.len());
        for (n, &w) in weights.iter().enumerate() {
            if w > 0.0 {
                kept_idx.extend_from_slice(&indices[n * d..(n + 1) * d]);
                kept_w.push(w);
            }
        }
        let total_load = kept_w.iter().sum();
        Ok(SparseTensor {
            dims,
            indices: kept_idx,
            weights: kept_w,
            total_load,
        })
    }

    /// Builds a pattern tensor where every listed index carries weight 1.
    pub fn from_pattern<I>(dims: Vec<usize>, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        Self::new(dims, raw.into_iter().map(|u| (u, 1.0)))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndims(&self) -> usize {
        self.dims.len()
    }

    /// Number of stored (merged, nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.weights.len()
    }

    pub fn total_load(&self) -> f64 {
        self.total_load
    }

    #[allow(clippy::should_implement_trait)]
    pub fn index(&self, n: usize) -> &[usize] {
        let d = self.ndims();
        &self.indices[n * d..(n + 1) * d]
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.weights[n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterates over `(index, weight)` pairs in lexicographic index order.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        let d = self.ndims().max(1);
        self.indices
            .chunks(d)
            .zip(self.weights.iter().copied())
            .take(self.weights.len())
    }

    /// Same tensor with every weight replaced by 1.
    pub fn to_pattern(&self) -> SparseTensor {
        let mut t = self.clone();
        t.weights.iter_mut().for_each(|w| *w = 1.0);
        t.total_load = t.weights.len() as f64;
        t
    }

    /// Requires a 2-D tensor and returns `(rows, cols)`.
    pub fn shape_2d(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            &[m, n] => Ok((m, n)),
            _ => Err(Error::Dimensionality {
                expected: 2,
                got: self.ndims(),
            }),
        }
    }

    /// Requires a square 2-D tensor and returns its extent.
    pub fn square_extent(&self) -> Result<usize> {
        let (m, n) = self.shape_2d()?;
        if m != n {
            return Err(Error::NotSquare { rows: m, cols: n });
        }
        Ok(m)
    }

    /// Weight of every entry as a flat per-dimension histogram.
    pub fn marginal(&self, dim: usize) -> Result<Vec<f64>> {
        if dim >= self.ndims() {
            return Err(Error::DimOutOfRange {
                dim,
                ndims: self.ndims(),
            });
        }
        let mut hist = vec![0.0; self.dims[dim]];
        for (index, w) in self.entries() {
            hist[index[dim]] += w;
        }
        Ok(hist)
    }

    /// Prefix sum of the load along `dim`.
    pub fn dim_prefix(&self, dim: usize) -> Result<DimPrefix> {
        let hist = self.marginal(dim)?;
        Ok(DimPrefix::from_costs(dim, &hist))
    }
}

/// Cumulative load along one dimension: `values[j]` is the load of all
/// entries with coordinate `< j`. Length is `extent + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DimPrefix {
    pub dim: usize,
    values: Vec<f64>,
}

impl DimPrefix {
    /// Prefix sum of per-slice costs.
    pub fn from_costs(dim: usize, costs: &[f64]) -> Self {
        let mut values = Vec::with_capacity(costs.len() + 1);
        let mut acc = 0.0;
        values.push(acc);
        for &c in costs {
            acc += c;
            values.push(acc);
        }
        DimPrefix { dim, values }
    }

    /// Wraps an already cumulative array. The caller guarantees it starts at
    /// zero and is non-decreasing.
    pub fn from_values(dim: usize, values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values[0] == 0.0);
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        DimPrefix { dim, values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extent(&self) -> usize {
        self.values.len() - 1
    }

    pub fn total(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Load of the half-open slab `[a, b)`.
    pub fn range(&self, a: usize, b: usize) -> f64 {
        if b <= a {
            0.0
        } else {
            self.values[b] - self.values[a]
        }
    }

    /// Largest boundary `x` with `values[x] <= y`.
    pub fn inverse(&self, y: f64) -> Result<usize> {
        let total = self.total();
        if !(0.0..=total).contains(&y) {
            return Err(Error::PrefixOutOfRange { value: y, total });
        }
        Ok(prefix_inverse(&self.values, y))
    }
}

/// Largest `x` such that `values[x] <= y`, for a non-decreasing `values`.
///
/// Values of `y` below `values[0]` map to 0.
pub fn prefix_inverse(values: &[f64], y: f64) -> usize {
    values.partition_point(|&v| v <= y).saturating_sub(1)
}
