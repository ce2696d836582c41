//! Criterion benchmarks for the exact kernels live in `benches/kernels.rs`.
