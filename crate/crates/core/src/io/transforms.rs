//! Preprocessing of square adjacency-style matrices.

use crate::error::Result;
use crate::tensor::SparseTensor;

/// Symmetric permutation ordering vertices by non-decreasing total degree
/// (row count plus column count), ties by original index. Returns the
/// permuted tensor and `perm`, where `perm[new] = old`.
pub fn reorder_degree_ascending(tensor: &SparseTensor) -> Result<(SparseTensor, Vec<usize>)> {
    let n = tensor.square_extent()?;
    let mut degree = vec![0usize; n];
    for (ix, _) in tensor.entries() {
        degree[ix[0]] += 1;
        degree[ix[1]] += 1;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by_key(|&v| (degree[v], v));
    let mut position = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        position[old] = new;
    }
    let permuted = SparseTensor::new(
        vec![n, n],
        tensor
            .entries()
            .map(|(ix, w)| (vec![position[ix[0]], position[ix[1]]], w)),
    )?;
    Ok((permuted, perm))
}

/// Keeps entries above the diagonal; the diagonal itself is kept only when
/// `include_diagonal` is set.
pub fn upper_triangular(tensor: &SparseTensor, include_diagonal: bool) -> Result<SparseTensor> {
    let n = tensor.square_extent()?;
    SparseTensor::new(
        vec![n, n],
        tensor
            .entries()
            .filter(|(ix, _)| ix[1] > ix[0] || (include_diagonal && ix[1] == ix[0]))
            .map(|(ix, w)| (ix.to_vec(), w)),
    )
}
