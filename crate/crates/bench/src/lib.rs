//! Criterion benchmarks for the memgym engine live in `benches/`.
