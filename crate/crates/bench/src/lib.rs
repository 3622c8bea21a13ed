//! Benchmarks for the attack pipelines live under `benches/`.
