//! Criterion benchmarks for the cube kernels; see `benches/cube.rs`.
