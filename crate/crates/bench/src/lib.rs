//! Criterion benchmarks for the colony engine live in `benches/`.
