//! Benchmarks for qclassical-core; see `benches/`.
