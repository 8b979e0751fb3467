use crate::rect_index::RectIndex;

use super::{optimal_partition, uniform_partition, IntervalCost};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

impl Axis {
    fn other(self) -> Axis {
        match self {
            Axis::Rows => Axis::Cols,
            Axis::Cols => Axis::Rows,
        }
    }
}

/// Interval cost along one axis with the other axis' cuts held fixed: the
/// heaviest tile the interval forms with any fixed part.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalCost<'a> {
    pub index: &'a RectIndex,
    pub axis: Axis,
    pub fixed: &'a [usize],
}

impl IntervalCost for ConditionalCost<'_> {
    fn len(&self) -> usize {
        match self.axis {
            Axis::Rows => self.index.rows(),
            Axis::Cols => self.index.cols(),
        }
    }

    fn cost(&self, a: usize, b: usize) -> f64 {
        self.fixed
            .windows(2)
            .map(|w| match self.axis {
                Axis::Rows => self.index.rect_load(a, b, w[0], w[1]),
                Axis::Cols => self.index.rect_load(w[0], w[1], a, b),
            })
            .fold(0.0, f64::max)
    }
}

/// A 2-D partition with its bottleneck.
#[derive(Debug, Clone, PartialEq)]
pub struct Rect2d {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub load: f64,
}

/// Heaviest tile of the grid `rows x cols`.
pub fn max_tile(index: &RectIndex, rows: &[usize], cols: &[usize]) -> f64 {
    ConditionalCost {
        index,
        axis: Axis::Cols,
        fixed: rows,
    }
    .cost_grid(cols)
}

impl ConditionalCost<'_> {
    fn cost_grid(&self, cuts: &[usize]) -> f64 {
        cuts.windows(2)
            .map(|w| self.cost(w[0], w[1]))
            .fold(0.0, f64::max)
    }
}

/// Optimal cuts of `axis` into `k` parts given the other axis' cuts.
pub fn conditional_optimum(
    index: &RectIndex,
    axis: Axis,
    fixed: &[usize],
    k: usize,
) -> (Vec<usize>, f64) {
    optimal_partition(&ConditionalCost { index, axis, fixed }, k)
}

/// Alternating conditional optimization starting from uniform column cuts.
///
/// Each step re-optimizes one axis against the other. A step is kept only
/// if it lowers the bottleneck; the first step that does not ends the run,
/// at which point both axes are conditionally optimal. `max_steps` bounds
/// the number of single-axis steps.
pub fn nicol_2d(index: &RectIndex, k: (usize, usize), max_steps: usize) -> Rect2d {
    let cols = uniform_partition(index.cols(), k.1);
    let (rows, load) = conditional_optimum(index, Axis::Rows, &cols, k.0);
    let mut best = Rect2d { rows, cols, load };
    let mut axis = Axis::Cols;
    for _ in 1..max_steps {
        let (fixed, parts) = match axis {
            Axis::Rows => (&best.cols, k.0),
            Axis::Cols => (&best.rows, k.1),
        };
        let (cuts, load) = conditional_optimum(index, axis, fixed, parts);
        if load >= best.load {
            break;
        }
        match axis {
            Axis::Rows => best.rows = cuts,
            Axis::Cols => best.cols = cuts,
        }
        best.load = load;
        axis = axis.other();
    }
    best
}

/// Two conditional steps from uniform columns: rows, then columns.
pub fn two_sweep(index: &RectIndex, k: (usize, usize)) -> Rect2d {
    let cols = uniform_partition(index.cols(), k.1);
    let (rows, _) = conditional_optimum(index, Axis::Rows, &cols, k.0);
    let (cols, load) = conditional_optimum(index, Axis::Cols, &rows, k.1);
    Rect2d { rows, cols, load }
}
