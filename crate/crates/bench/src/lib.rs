//! Benchmarks live in `benches/`; the library target is empty.
