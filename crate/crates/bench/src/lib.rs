//! Benchmark-only crate; see `benches/widths.rs`.
