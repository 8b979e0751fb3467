//! File formats and input preprocessing.

mod matrix_market;
mod points;
mod records;
mod transforms;

pub use matrix_market::{
    parse_matrix_market, read_matrix_market, write_matrix_market, ReadOptions,
};
pub use points::{parse_points, points_to_tensor, read_points, PointSet};
pub use records::{
    read_partition, read_results_csv, write_partition, write_results_csv, PartitionRecord,
    ResultRow, RowKind, PARTITION_MAGIC, PARTITION_VERSION, TIMING_COLUMNS,
};
pub use transforms::{reorder_degree_ascending, upper_triangular};
