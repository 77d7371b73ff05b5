//! Criterion benchmarks for the lattice, envelope and evaluator; see
//! `benches/`.
