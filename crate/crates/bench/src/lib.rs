//! Seeded inputs shared by the benchmarks.

use std::collections::BTreeSet;

use hqmc_core::random::{self, ChainShape};
use hqmc_core::{Blm, ComplexMatrix, HqMC, QuantumOperation};

/// A probabilistic machine on `n` states and a conjugate of it, so the
/// equivalence check has to build a full basis.
pub fn conjugate_pair(n: usize, seed: u64) -> (Blm, Blm) {
    let mut r = random::rng(seed);
    let a = random::probabilistic_blm(&mut r, n, 2);
    let b = a
        .conjugated(&random::unitary(&mut r, n))
        .expect("square and invertible");
    (a, b)
}

/// A random chain with the last state as reachability target.
pub fn reach_case(states: usize, dim: usize, seed: u64) -> (HqMC, BTreeSet<usize>) {
    let mut r = random::rng(seed);
    let m = random::hqmc(&mut r, ChainShape::new(states, dim));
    (m, [states - 1].into_iter().collect())
}

pub fn channel(dim: usize, kraus: usize, seed: u64) -> QuantumOperation {
    random::channel(&mut random::rng(seed), dim, kraus)
}

pub fn matrices(n: usize, seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    let mut r = random::rng(seed);
    (
        random::gaussian_matrix(&mut r, n, n),
        random::gaussian_matrix(&mut r, n, n),
    )
}
