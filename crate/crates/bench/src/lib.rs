//! Benchmark-only crate; see `benches/grayscale.rs`.
