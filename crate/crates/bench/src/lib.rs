//! Benchmarks live in `benches/`; run with `cargo bench -p conic-heat-bench`.
