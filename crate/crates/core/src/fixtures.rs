//! Small reference inputs shared by tests, examples and the CLI.

use crate::tensor::SparseTensor;

/// Nonzero coordinates of the 8x8 toy matrix.
///
/// Row sums `[5,4,2,0,1,0,2,1]`, column sums `[2,1,1,3,1,1,4,2]`, tile
/// loads `[[2,2,5],[0,2,0],[1,0,3]]` under cuts `[0,2,4,8]` on both axes.
pub const TOY_ENTRIES: [(usize, usize); 15] = [
    (0, 0),
    (0, 3),
    (0, 4),
    (0, 6),
    (0, 7),
    (1, 0),
    (1, 3),
    (1, 6),
    (1, 7),
    (2, 2),
    (2, 3),
    (4, 6),
    (6, 1),
    (6, 5),
    (7, 6),
];

/// The 8x8 toy matrix as a unit-weight tensor.
pub fn toy_matrix() -> SparseTensor {
    SparseTensor::from_pattern(vec![8, 8], TOY_ENTRIES.iter().map(|&(r, c)| vec![r, c]))
        .expect("toy matrix is well formed")
}
