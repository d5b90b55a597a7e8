//! Criterion benchmarks for `mdms-core`; see `benches/`.
