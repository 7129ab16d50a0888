//! Criterion benchmarks for `pointopt`; see `benches/`.
