//! Criterion benchmarks for fmtk live under `benches/`.
