#![allow(dead_code)] // each test binary uses its own subset of the helpers

//! Shared sector samplers for the integration suites.
//!
//! Three sectors, all seeded and deterministic:
//! - classical: flat Dirichlet joint distributions on all-classical systems;
//! - box-world: Dirichlet mixtures of the no-signalling vertex family on a
//!   gbit pair;
//! - quantum: behavior tables exported from random two-qubit density
//!   matrices measured at random equatorial angles.

use gpt_core::quantum::{qubit_pair_behavior, random_density_matrix, MeasurementAngles};
use gpt_core::sampler::{sample_boxworld_state, sample_classical_state};
use gpt_core::{StateTable, SystemType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rotating menu of small all-classical systems.
pub fn classical_system(idx: usize) -> SystemType {
    let menu = [
        vec![(1, 2), (1, 2)],
        vec![(1, 2), (1, 3)],
        vec![(1, 2), (1, 2), (1, 2)],
        vec![(1, 3), (1, 2), (1, 2)],
    ];
    SystemType::from_pairs(&menu[idx % menu.len()])
}

pub fn classical_samples(seed: u64, n: usize) -> Vec<StateTable> {
    let mut rng = rng(seed);
    (0..n)
        .map(|i| sample_classical_state(&classical_system(i), &mut rng).expect("valid sample"))
        .collect()
}

pub fn gbit_pair() -> SystemType {
    SystemType::from_pairs(&[(2, 2), (2, 2)])
}

pub fn boxworld_samples(seed: u64, n: usize) -> Vec<StateTable> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| sample_boxworld_state(&gbit_pair(), &mut rng).expect("valid sample"))
        .collect()
}

pub fn quantum_samples(seed: u64, n: usize) -> Vec<StateTable> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let rho = random_density_matrix(4, &mut rng).expect("valid density matrix");
            let angles = MeasurementAngles {
                alice: [
                    rng.random_range(0.0..std::f64::consts::TAU),
                    rng.random_range(0.0..std::f64::consts::TAU),
                ],
                bob: [
                    rng.random_range(0.0..std::f64::consts::TAU),
                    rng.random_range(0.0..std::f64::consts::TAU),
                ],
            };
            qubit_pair_behavior(&rho, &angles).expect("valid behavior table")
        })
        .collect()
}
