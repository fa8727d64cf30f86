//! Criterion benchmarks for the geometry kernels, single runs and ensembles.
//! Run with `cargo bench -p busemann-bench`.
