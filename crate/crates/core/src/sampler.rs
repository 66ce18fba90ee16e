//! Seeded random state generation for counterexample searches.
//!
//! Box-world states are convex mixtures of no-signalling vertices. For the
//! two-gbit system the full vertex list is known and hardcoded: 16
//! product-deterministic vertices and 8 PR-box variants, 24 in all. For
//! larger systems this module mixes over a *generating family* — all
//! product-deterministic vertices plus every embedding of a PR variant into a
//! pair of gbit-type parties — which spans a rich subpolytope but is not a
//! complete vertex enumeration (genuinely multipartite vertices exist beyond
//! two parties). Searches that need specific extremal structure seed it
//! explicitly rather than waiting for the mixer to find it.
//!
//! All randomness flows through a caller-provided [`rand::Rng`]; every public
//! sampler is deterministic in the RNG state.

use rand::Rng;

use crate::error::{Error, Result};
use crate::state::{product_deterministic_state, StateTable};
use crate::system::{PartyType, SystemType};

/// Cap on the size of the generating vertex family.
const MAX_VERTICES: usize = 20_000;

/// Flat Dirichlet weights: n nonnegative reals summing to 1, sampled as
/// normalized Exp(1) draws (−ln U).
pub fn dirichlet_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    assert!(n > 0, "cannot sample zero weights");
    let mut w: Vec<f64> = (0..n)
        .map(|_| -(1.0f64 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// PR-box variant: P(ab|jj′) = ½·[a ⊕ b = j·j′ ⊕ α·j ⊕ β·j′ ⊕ γ].
/// (α, β, γ) = (0, 0, 0) is the PR box itself; the 8 variants are the
/// non-local vertices of the two-gbit no-signalling polytope.
pub fn pr_variant(alpha: usize, beta: usize, gamma: usize) -> Result<StateTable> {
    if alpha > 1 || beta > 1 || gamma > 1 {
        return Err(Error::InvalidParameter(format!(
            "PR variant flags must be bits, got ({alpha},{beta},{gamma})"
        )));
    }
    let system = SystemType::from_pairs(&[(2, 2), (2, 2)]);
    let mut entries = vec![0.0f64; 16];
    for j in 0..2usize {
        for jp in 0..2usize {
            let target = (j & jp) ^ (alpha & j) ^ (beta & jp) ^ gamma;
            for a in 0..2usize {
                for b in 0..2usize {
                    if a ^ b == target {
                        entries[(2 * j + jp) * 4 + 2 * a + b] = 0.5;
                    }
                }
            }
        }
    }
    StateTable::new(system, entries)
}

/// All product-deterministic vertices of a system: every per-party assignment
/// of one outcome to each setting. Errors if the family exceeds the cap.
pub fn product_deterministic_vertices(system: &SystemType) -> Result<Vec<StateTable>> {
    system.validate()?;
    let per_party: Vec<usize> = system
        .parties
        .iter()
        .map(|p| p.outcomes.pow(p.settings as u32))
        .collect();
    let total: usize = per_party.iter().try_fold(1usize, |acc, &n| {
        acc.checked_mul(n).filter(|&t| t <= MAX_VERTICES)
    }).ok_or_else(|| Error::InvalidParameter(format!(
        "product-deterministic family exceeds cap {MAX_VERTICES}"
    )))?;

    let mut out = Vec::with_capacity(total);
    let mut counter = vec![0usize; system.n_parties()];
    loop {
        let assignments: Vec<Vec<usize>> = system
            .parties
            .iter()
            .zip(&counter)
            .map(|(p, &code)| {
                // Decode the assignment code into outcomes per setting.
                let mut code = code;
                (0..p.settings)
                    .map(|_| {
                        let o = code % p.outcomes;
                        code /= p.outcomes;
                        o
                    })
                    .collect()
            })
            .collect();
        out.push(product_deterministic_state(system, &assignments)?);

        let mut t = 0;
        loop {
            if t == counter.len() {
                return Ok(out);
            }
            counter[t] += 1;
            if counter[t] < per_party[t] {
                break;
            }
            counter[t] = 0;
            t += 1;
        }
    }
}

/// The generating vertex family for box-world sampling: complete (24
/// vertices) for the two-gbit system, product-deterministic plus embedded PR
/// variants otherwise.
pub fn boxworld_vertices(system: &SystemType) -> Result<Vec<StateTable>> {
    system.validate()?;
    let mut vertices = product_deterministic_vertices(system)?;

    let gbit = PartyType::gbit();
    let gbit_parties: Vec<usize> = (0..system.n_parties())
        .filter(|&p| system.parties[p] == gbit)
        .collect();

    if system.parties.len() == 2 && gbit_parties.len() == 2 {
        // Complete two-gbit polytope: 16 local + 8 PR variants = 24.
        for code in 0..8usize {
            vertices.push(pr_variant((code >> 2) & 1, (code >> 1) & 1, code & 1)?);
        }
        return Ok(vertices);
    }

    // Embeddings: PR variant on a gbit pair, deterministic on the rest.
    for (idx_p, &p) in gbit_parties.iter().enumerate() {
        for &q in &gbit_parties[idx_p + 1..] {
            let rest: Vec<usize> = (0..system.n_parties()).filter(|&r| r != p && r != q).collect();
            let rest_system = system.subsystem(&rest)?;
            let rest_vertices = if rest.is_empty() {
                vec![StateTable::vacuum()]
            } else {
                product_deterministic_vertices(&rest_system)?
            };
            for code in 0..8usize {
                let pr = pr_variant((code >> 2) & 1, (code >> 1) & 1, code & 1)?;
                for rest_state in &rest_vertices {
                    if vertices.len() >= MAX_VERTICES {
                        return Err(Error::InvalidParameter(format!(
                            "box-world vertex family exceeds cap {MAX_VERTICES}"
                        )));
                    }
                    // Tensor as (pair, rest), then permute parties home:
                    // position order after tensor is [p, q, rest...].
                    let tensored = pr.tensor(rest_state);
                    let mut order: Vec<usize> = vec![p, q];
                    order.extend(&rest);
                    // perm[new_position] = old_position in `tensored`.
                    let mut perm = vec![0usize; order.len()];
                    for (old_pos, &home) in order.iter().enumerate() {
                        perm[home] = old_pos;
                    }
                    vertices.push(tensored.permute_parties(&perm)?);
                }
            }
        }
    }
    Ok(vertices)
}

/// Random box-world state: flat-Dirichlet mixture over
/// [`boxworld_vertices`].
pub fn sample_boxworld_state<R: Rng + ?Sized>(
    system: &SystemType,
    rng: &mut R,
) -> Result<StateTable> {
    let vertices = boxworld_vertices(system)?;
    mix_vertices(&vertices, rng)
}

/// Random local (classically correlated) state: flat-Dirichlet mixture over
/// the product-deterministic vertices only.
pub fn sample_local_deterministic_mixture<R: Rng + ?Sized>(
    system: &SystemType,
    rng: &mut R,
) -> Result<StateTable> {
    let vertices = product_deterministic_vertices(system)?;
    mix_vertices(&vertices, rng)
}

/// Random state of an all-classical system (every party has one setting):
/// a flat-Dirichlet joint distribution over the outcome tuples.
pub fn sample_classical_state<R: Rng + ?Sized>(
    system: &SystemType,
    rng: &mut R,
) -> Result<StateTable> {
    system.validate()?;
    if !system.is_all_classical() {
        return Err(Error::NotClassical {
            party: usize::MAX,
            settings: system.n_settings(),
        });
    }
    StateTable::new(system.clone(), dirichlet_weights(system.n_outcomes(), rng))
}

/// Random column-stochastic matrix `m[out][in]` (each column a flat-Dirichlet
/// distribution), for classical-processing transformations.
pub fn random_stochastic_matrix<R: Rng + ?Sized>(
    n_out: usize,
    n_in: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    assert!(n_out > 0 && n_in > 0);
    let cols: Vec<Vec<f64>> = (0..n_in).map(|_| dirichlet_weights(n_out, rng)).collect();
    (0..n_out).map(|row| cols.iter().map(|c| c[row]).collect()).collect()
}

fn mix_vertices<R: Rng + ?Sized>(vertices: &[StateTable], rng: &mut R) -> Result<StateTable> {
    let weights = dirichlet_weights(vertices.len(), rng);
    let pairs: Vec<(f64, &StateTable)> = weights.iter().copied().zip(vertices.iter()).collect();
    StateTable::convex_mix(&pairs)
}
