//! Criterion benchmarks for the analysis kernels live in `benches/`.
