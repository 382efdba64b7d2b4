//! Benchmark-only crate; the kernels under test live in nbody-core.
