//! Partitioning objectives as sums of embedded 2-D load distributions.
//!
//! A [`Problem`] over `d` dimensions is a list of terms, each a 2-D rectangle
//! index attached to an ordered pair of problem dimensions. The load of tile
//! `j` is the sum over terms of that term's 2-D tile at the projected
//! coordinates. This covers plain and symmetric 2-D partitioning (one term),
//! SUMMA-style SpGEMM (`A` on dims 0,1 plus `B` on dims 1,2) and triangle
//! counting tasks (`A` on dims 0,1 / 1,2 / 0,2).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rect_index::RectIndex;
use crate::sgo::ConstraintSpec;
use crate::tensor::{DimPrefix, SparseTensor};

/// One cut array per dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition(pub Vec<Vec<usize>>);

impl Partition {
    pub fn new(cuts: Vec<Vec<usize>>) -> Self {
        Partition(cuts)
    }

    pub fn ndims(&self) -> usize {
        self.0.len()
    }

    pub fn dim(&self, i: usize) -> &[usize] {
        &self.0[i]
    }

    pub fn cuts(&self) -> &[Vec<usize>] {
        &self.0
    }

    /// Part counts implied by the cut arrays.
    pub fn parts(&self) -> Vec<usize> {
        self.0.iter().map(|p| p.len().saturating_sub(1)).collect()
    }

    /// Checks shape, endpoints and monotonicity against extents and part
    /// counts.
    pub fn validate(&self, extents: &[usize], parts: &[usize]) -> Result<()> {
        if self.0.len() != extents.len() {
            return Err(Error::Partition(format!(
                "{} cut arrays for a {}-dimensional problem",
                self.0.len(),
                extents.len()
            )));
        }
        for (i, p) in self.0.iter().enumerate() {
            if p.len() != parts[i] + 1 {
                return Err(Error::Partition(format!(
                    "dimension {i}: {} boundaries, expected {}",
                    p.len(),
                    parts[i] + 1
                )));
            }
            if p[0] != 0 || p[p.len() - 1] != extents[i] {
                return Err(Error::Partition(format!(
                    "dimension {i}: cuts must span [0, {}], got {p:?}",
                    extents[i]
                )));
            }
            if p.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Partition(format!(
                    "dimension {i}: cuts not monotone: {p:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Dense row-major array of tile loads with shape `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TileLoads {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl TileLoads {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), data.len());
        TileLoads { shape, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    fn flat(&self, j: &[usize]) -> usize {
        j.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&x, &n)| acc * n + x)
    }

    /// Multi-index of a flat position.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut j = vec![0; self.shape.len()];
        for (slot, &n) in j.iter_mut().zip(&self.shape).rev() {
            *slot = flat % n;
            flat /= n;
        }
        j
    }

    pub fn get(&self, j: &[usize]) -> f64 {
        self.data[self.flat(j)]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Maximum load and the lexicographically smallest tile attaining it.
    pub fn argmax(&self) -> (Vec<usize>, f64) {
        let mut best = 0;
        for (n, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = n;
            }
        }
        (
            self.unravel(best),
            self.data.get(best).copied().unwrap_or(0.0),
        )
    }

    /// For each slab index along `dim`, the maximum tile load in that slab.
    pub fn slab_maxima(&self, dim: usize) -> Vec<f64> {
        let n = self.shape[dim];
        let inner: usize = self.shape[dim + 1..].iter().product();
        let mut r = vec![f64::NEG_INFINITY; n];
        for (flat, &v) in self.data.iter().enumerate() {
            let j = (flat / inner) % n;
            if v > r[j] {
                r[j] = v;
            }
        }
        r
    }
}

/// Named objective families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    #[serde(rename = "rpp2d")]
    Rpp2d,
    #[serde(rename = "srpp2d")]
    Srpp2d,
    #[serde(rename = "spgemm3d")]
    Spgemm3d,
    #[serde(rename = "tri3d")]
    Tri3d,
    #[serde(rename = "custom")]
    Custom,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Rpp2d => "rpp2d",
            Objective::Srpp2d => "srpp2d",
            Objective::Spgemm3d => "spgemm3d",
            Objective::Tri3d => "tri3d",
            Objective::Custom => "custom",
        }
    }

    pub fn ndims(self) -> Option<usize> {
        match self {
            Objective::Rpp2d | Objective::Srpp2d => Some(2),
            Objective::Spgemm3d | Objective::Tri3d => Some(3),
            Objective::Custom => None,
        }
    }

    /// Number of input matrices the objective is built from.
    pub fn arity(self) -> usize {
        match self {
            Objective::Spgemm3d => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rpp2d" => Objective::Rpp2d,
            "srpp2d" => Objective::Srpp2d,
            "spgemm3d" => Objective::Spgemm3d,
            "tri3d" => Objective::Tri3d,
            "custom" => Objective::Custom,
            _ => return Err(Error::Config(format!("unknown objective {s:?}"))),
        })
    }
}

/// A 2-D load distribution embedded on two problem dimensions.
#[derive(Debug, Clone)]
pub struct Term {
    pub index: Arc<RectIndex>,
    /// Problem dimensions carried by the term's rows and columns.
    pub dims: (usize, usize),
    row_prefix: Arc<DimPrefix>,
    col_prefix: Arc<DimPrefix>,
}

/// Shared, precomputed data for one 2-D input tensor.
#[derive(Debug, Clone)]
pub struct TermSource {
    index: Arc<RectIndex>,
    row_prefix: Arc<DimPrefix>,
    col_prefix: Arc<DimPrefix>,
}

impl TermSource {
    pub fn new(tensor: &SparseTensor) -> Result<Self> {
        tensor.shape_2d()?;
        Ok(TermSource {
            index: Arc::new(RectIndex::new(tensor)?),
            row_prefix: Arc::new(tensor.dim_prefix(0)?),
            col_prefix: Arc::new(tensor.dim_prefix(1)?),
        })
    }

    pub fn index(&self) -> &RectIndex {
        &self.index
    }

    fn embed(&self, dims: (usize, usize)) -> Term {
        Term {
            index: Arc::clone(&self.index),
            dims,
            row_prefix: Arc::clone(&self.row_prefix),
            col_prefix: Arc::clone(&self.col_prefix),
        }
    }
}

/// Result of evaluating a partition.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub max_load: f64,
    pub argmax: Vec<usize>,
    pub tiles: TileLoads,
}

/// A load oracle with part counts and constraint groups.
#[derive(Debug, Clone)]
pub struct Problem {
    objective: Objective,
    terms: Vec<Term>,
    extents: Vec<usize>,
    parts: Vec<usize>,
    constraints: ConstraintSpec,
    prefixes: Vec<DimPrefix>,
}

impl Problem {
    /// General constructor from `(source, (row_dim, col_dim))` terms.
    pub fn from_terms(
        objective: Objective,
        extents: Vec<usize>,
        parts: Vec<usize>,
        terms: Vec<(TermSource, (usize, usize))>,
        groups: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let d = extents.len();
        if parts.len() != d {
            return Err(Error::Mismatch(format!(
                "{} part counts for {d} dimensions",
                parts.len()
            )));
        }
        if parts.contains(&0) {
            return Err(Error::Config("part counts must be >= 1".into()));
        }
        let constraints = ConstraintSpec::new(groups, &parts)?;
        for g in constraints.groups() {
            if g.iter().any(|&i| extents[i] != extents[g[0]]) {
                return Err(Error::Constraint(format!(
                    "grouped dimensions {g:?} have different extents"
                )));
            }
        }
        let mut embedded = Vec::with_capacity(terms.len());
        for (src, (a, b)) in terms {
            if a >= d || b >= d || a == b {
                return Err(Error::Mismatch(format!(
                    "term dimensions ({a}, {b}) invalid for d={d}"
                )));
            }
            if src.index.rows() != extents[a] || src.index.cols() != extents[b] {
                return Err(Error::Mismatch(format!(
                    "term of shape {}x{} does not fit extents {} and {}",
                    src.index.rows(),
                    src.index.cols(),
                    extents[a],
                    extents[b]
                )));
            }
            embedded.push(src.embed((a, b)));
        }

        // composite prefix: sum of the marginals of every term touching the
        // dimension
        let mut prefixes = Vec::with_capacity(d);
        for (i, &n) in extents.iter().enumerate() {
            let mut values = vec![0.0; n + 1];
            for t in &embedded {
                let src = if t.dims.0 == i {
                    Some(&t.row_prefix)
                } else if t.dims.1 == i {
                    Some(&t.col_prefix)
                } else {
                    None
                };
                if let Some(p) = src {
                    values
                        .iter_mut()
                        .zip(p.values())
                        .for_each(|(v, &x)| *v += x);
                }
            }
            prefixes.push(DimPrefix::from_values(i, values));
        }

        Ok(Problem {
            objective,
            terms: embedded,
            extents,
            parts,
            constraints,
            prefixes,
        })
    }

    /// Plain 2-D rectilinear partitioning of `a` into `k1 x k2` tiles.
    pub fn rpp2d(a: &SparseTensor, k1: usize, k2: usize) -> Result<Self> {
        let (m, n) = a.shape_2d()?;
        Self::from_terms(
            Objective::Rpp2d,
            vec![m, n],
            vec![k1, k2],
            vec![(TermSource::new(a)?, (0, 1))],
            vec![vec![0], vec![1]],
        )
    }

    /// Symmetric 2-D partitioning: one cut array shared by rows and columns.
    pub fn srpp2d(a: &SparseTensor, k: usize) -> Result<Self> {
        let n = a.square_extent()?;
        Self::from_terms(
            Objective::Srpp2d,
            vec![n, n],
            vec![k, k],
            vec![(TermSource::new(a)?, (0, 1))],
            vec![vec![0, 1]],
        )
    }

    /// SUMMA SpGEMM tasks: tile `(u, w, v)` carries `A[u, w] + B[w, v]`.
    pub fn spgemm3d(a: &SparseTensor, b: &SparseTensor, k: [usize; 3]) -> Result<Self> {
        let (m, n) = a.shape_2d()?;
        let (n2, q) = b.shape_2d()?;
        if n != n2 {
            return Err(Error::Mismatch(format!(
                "A has {n} columns but B has {n2} rows"
            )));
        }
        Self::from_terms(
            Objective::Spgemm3d,
            vec![m, n, q],
            k.to_vec(),
            vec![(TermSource::new(a)?, (0, 1)), (TermSource::new(b)?, (1, 2))],
            vec![vec![0], vec![1], vec![2]],
        )
    }

    /// Triangle-counting tasks: tile `(u, w, v)` carries
    /// `A[u, w] + A[w, v] + A[u, v]` with one shared cut array.
    pub fn tri3d(a: &SparseTensor, k: usize) -> Result<Self> {
        let n = a.square_extent()?;
        let src = TermSource::new(a)?;
        Self::from_terms(
            Objective::Tri3d,
            vec![n, n, n],
            vec![k, k, k],
            vec![(src.clone(), (0, 1)), (src.clone(), (1, 2)), (src, (0, 2))],
            vec![vec![0, 1, 2]],
        )
    }

    /// Same terms and constraint groups with new part counts.
    pub fn with_parts(&self, parts: Vec<usize>) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                (
                    TermSource {
                        index: Arc::clone(&t.index),
                        row_prefix: Arc::clone(&t.row_prefix),
                        col_prefix: Arc::clone(&t.col_prefix),
                    },
                    t.dims,
                )
            })
            .collect();
        Self::from_terms(
            self.objective,
            self.extents.clone(),
            parts,
            terms,
            self.constraints.groups().to_vec(),
        )
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    pub fn ndims(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn constraints(&self) -> &ConstraintSpec {
        &self.constraints
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Cumulative load along dimension `i`: the sum of the marginals of all
    /// terms that involve `i`.
    pub fn dim_prefix(&self, i: usize) -> &DimPrefix {
        &self.prefixes[i]
    }

    /// Total weight of all input entries.
    pub fn input_load(&self) -> f64 {
        self.terms.iter().map(|t| t.index.total()).sum()
    }

    /// Sum of all tile loads, which is independent of the cut positions.
    /// Equals the input load for single-term problems.
    pub fn tile_total(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let others: usize = (0..self.ndims())
                    .filter(|&i| i != t.dims.0 && i != t.dims.1)
                    .map(|i| self.parts[i])
                    .product();
                t.index.total() * others as f64
            })
            .sum()
    }

    /// Loads of every tile under `p`. Cut arrays are trusted to be
    /// monotone; see [`Problem::evaluate`] for the checked version.
    pub fn tile_loads(&self, p: &Partition) -> TileLoads {
        let shape = p.parts();
        let tables: Vec<Vec<f64>> = self
            .terms
            .iter()
            .map(|t| term_table(&t.index, p.dim(t.dims.0), p.dim(t.dims.1)))
            .collect();
        let total: usize = shape.iter().product();
        let mut data = vec![0.0; total];
        let mut j = vec![0usize; shape.len()];
        for slot in data.iter_mut() {
            let mut v = 0.0;
            for (t, table) in self.terms.iter().zip(&tables) {
                let cols = shape[t.dims.1];
                v += table[j[t.dims.0] * cols + j[t.dims.1]];
            }
            *slot = v;
            // odometer increment, last dimension fastest
            for x in (0..j.len()).rev() {
                j[x] += 1;
                if j[x] < shape[x] {
                    break;
                }
                j[x] = 0;
            }
        }
        TileLoads::new(shape, data)
    }

    /// Maximum tile load with its location, after validating `p`.
    pub fn evaluate(&self, p: &Partition) -> Result<Evaluation> {
        p.validate(&self.extents, &self.parts)?;
        let tiles = self.tile_loads(p);
        let (argmax, max_load) = tiles.argmax();
        Ok(Evaluation {
            max_load,
            argmax,
            tiles,
        })
    }

    /// Maximum tile load divided by the average tile load.
    pub fn normalized_load(&self, p: &Partition) -> Result<f64> {
        let total = self.tile_total();
        if total <= 0.0 {
            return Err(Error::ZeroLoad);
        }
        let max = self.evaluate(p)?.max_load;
        let tiles: usize = self.parts.iter().product();
        Ok(max * tiles as f64 / total)
    }
}

/// Tile table of one 2-D index under the given row and column cuts.
fn term_table(index: &RectIndex, rows: &[usize], cols: &[usize]) -> Vec<f64> {
    let (kr, kc) = (rows.len() - 1, cols.len() - 1);
    let row = |a: usize| -> Vec<f64> {
        (0..kc)
            .map(|b| index.rect_load(rows[a], rows[a + 1], cols[b], cols[b + 1]))
            .collect()
    };
    if kr * kc >= 256 {
        (0..kr).into_par_iter().flat_map_iter(row).collect()
    } else {
        (0..kr).flat_map(row).collect()
    }
}
