//! Criterion benchmarks for `vbsim-core`; see `benches/`.
