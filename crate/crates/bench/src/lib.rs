//! Criterion benchmarks for sgpart live under `benches/`.
