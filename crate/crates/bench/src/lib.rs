//! Criterion benchmarks for `hsp-core`; see `benches/`.
