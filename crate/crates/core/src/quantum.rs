//! Quantum states and the behaviors they induce on a pair of gbit slots.
//!
//! Density matrices are validated (Hermitian, unit trace, positive within
//! [`QUANTUM_TOL`]). Von Neumann entropy is computed from the
//! eigenvalues; for quantum states the measurement-entropy minimum over all
//! fine-grained POVMs is attained at the eigenbasis measurement, so the
//! toolkit *defines* the quantum-side entropy as the von Neumann entropy
//! rather than grid-searching POVMs.
//!
//! Behavior tables come from equatorial projective measurements on a
//! two-qubit state: outcome `a ∈ {0,1}` of the angle-θ measurement has
//! projector Π_a(θ) = (I + (−1)^a (cosθ·X + sinθ·Y))/2, and
//! P(ab|jj′) = Re Tr[ρ (Π_a(θ_A,j) ⊗ Π_b(θ_B,j′))].

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateTable;
use crate::system::SystemType;

/// Tolerance for density-matrix validation (Hermiticity, trace, positivity).
pub const QUANTUM_TOL: f64 = 1e-12;

/// A validated density matrix of arbitrary finite dimension.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validate and wrap a matrix: square, Hermitian within [`QUANTUM_TOL`],
    /// trace 1 within [`QUANTUM_TOL`], eigenvalues ≥ −[`QUANTUM_TOL`].
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::InvalidQuantumState(format!(
                "density matrix must be square and nonempty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let herm_dev = (&data - data.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_dev > QUANTUM_TOL {
            return Err(Error::InvalidQuantumState(format!(
                "not Hermitian: max |ρ − ρ†| entry = {herm_dev:e}"
            )));
        }
        let trace = data.trace();
        if (trace.re - 1.0).abs() > QUANTUM_TOL || trace.im.abs() > QUANTUM_TOL {
            return Err(Error::InvalidQuantumState(format!(
                "trace is {trace}, must be 1"
            )));
        }
        let min_eig = hermitian_eigenvalues(&data).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -QUANTUM_TOL {
            return Err(Error::InvalidQuantumState(format!(
                "not positive semidefinite: min eigenvalue = {min_eig:e}"
            )));
        }
        Ok(Self { data })
    }

    /// Pure state ρ = |ψ⟩⟨ψ| from an amplitude vector (normalized here).
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidQuantumState("zero state vector".into()));
        }
        let dim = amplitudes.len();
        let data = DMatrix::from_fn(dim, dim, |r, c| {
            amplitudes[r] * amplitudes[c].conj() / norm2
        });
        Self::new(data)
    }

    /// Diagonal (classical) density matrix from a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let dim = probs.len();
        let data = DMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                Complex64::new(probs[r], 0.0)
            } else {
                Complex64::default()
            }
        });
        Self::new(data)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    /// Re Tr[ρ·op] — the expectation value of a Hermitian operator.
    pub fn expect(&self, op: &DMatrix<Complex64>) -> f64 {
        (op * &self.data).trace().re
    }

    /// Von Neumann entropy −Σ λᵢ log₂ λᵢ in bits.
    pub fn von_neumann_entropy(&self) -> f64 {
        let mut h = 0.0;
        for lambda in hermitian_eigenvalues(&self.data) {
            let l = lambda.clamp(0.0, 1.0);
            if l > 0.0 {
                h -= l * l.log2();
            }
        }
        h.max(0.0)
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    // Symmetrize first so validation slack never feeds a non-Hermitian
    // matrix to the solver.
    let sym = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(sym).eigenvalues.iter().copied().collect()
}

/// Von Neumann entropy of a density matrix, in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.von_neumann_entropy()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli X.
pub fn pauli_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

/// Pauli Y.
pub fn pauli_y() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

/// Pauli Z.
pub fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Projector Π_a(θ) = (I + (−1)^a (cosθ·X + sinθ·Y))/2 onto the equatorial
/// direction θ (outcome a ∈ {0,1}).
pub fn equatorial_projector(theta: f64, outcome: usize) -> Result<DMatrix<Complex64>> {
    if outcome > 1 {
        return Err(Error::InvalidParameter(format!(
            "projector outcome must be 0 or 1, got {outcome}"
        )));
    }
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    let obs = pauli_x().scale(theta.cos()) + pauli_y().scale(theta.sin());
    Ok((DMatrix::identity(2, 2) + obs.scale(sign)).scale(0.5))
}

/// The singlet state |ψ⁻⟩ = (|01⟩ − |10⟩)/√2 as a density matrix.
pub fn singlet() -> DensityMatrix {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure(&[c(0., 0.), c(inv, 0.), c(-inv, 0.), c(0., 0.)])
        .expect("singlet is a valid state")
}

/// Oracle for the singlet correlator under equatorial measurements:
/// E(θ_A, θ_B) = ⟨(−1)^{a⊕b}⟩ = −cos(θ_A − θ_B).
pub fn singlet_correlator(theta_a: f64, theta_b: f64) -> f64 {
    -(theta_a - theta_b).cos()
}

/// Two equatorial measurement angles per side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngles {
    /// Alice's angles (θ_{A,0}, θ_{A,1}) in radians.
    pub alice: [f64; 2],
    /// Bob's angles (θ_{B,0}, θ_{B,1}) in radians.
    pub bob: [f64; 2],
}

/// Behavior table of a two-qubit state under per-setting equatorial
/// projective measurements: a validated two-gbit state table with
/// P(ab|jj′) = Re Tr[ρ (Π_a(θ_{A,j}) ⊗ Π_b(θ_{B,j′}))].
pub fn qubit_pair_behavior(rho: &DensityMatrix, angles: &MeasurementAngles) -> Result<StateTable> {
    if rho.dim() != 4 {
        return Err(Error::InvalidQuantumState(format!(
            "behavior tables need a two-qubit state (dim 4), got dim {}",
            rho.dim()
        )));
    }
    let system = SystemType::from_pairs(&[(2, 2), (2, 2)]);
    let mut entries = vec![0.0f64; 16];
    for j in 0..2 {
        for jp in 0..2 {
            let setting = 2 * j + jp;
            for a in 0..2 {
                let pa = equatorial_projector(angles.alice[j], a)?;
                for b in 0..2 {
                    let pb = equatorial_projector(angles.bob[jp], b)?;
                    let p = rho.expect(&pa.kronecker(&pb)).clamp(0.0, 1.0);
                    entries[setting * 4 + 2 * a + b] = p;
                }
            }
        }
    }
    StateTable::new(system, entries)
}

/// The equatorial correlation block T_{αβ} = Re Tr[ρ (σ_α ⊗ σ_β)] for
/// α, β ∈ {x, y}; the correlator at angles (θ_A, θ_B) is u(θ_A)ᵀ T u(θ_B)
/// with u(θ) = (cosθ, sinθ).
pub fn equatorial_t_matrix(rho: &DensityMatrix) -> Result<[[f64; 2]; 2]> {
    if rho.dim() != 4 {
        return Err(Error::InvalidQuantumState(format!(
            "correlation block needs a two-qubit state (dim 4), got dim {}",
            rho.dim()
        )));
    }
    let sig = [pauli_x(), pauli_y()];
    let mut t = [[0.0f64; 2]; 2];
    for (alpha, sa) in sig.iter().enumerate() {
        for (beta, sb) in sig.iter().enumerate() {
            t[alpha][beta] = rho.expect(&sa.kronecker(sb));
        }
    }
    Ok(t)
}

/// Ginibre-ensemble random density matrix: ρ = GG†/Tr(GG†) with i.i.d.
/// standard-complex-Gaussian G.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let g = DMatrix::from_fn(dim, dim, |_, _| c(standard_normal(rng), standard_normal(rng)));
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.scale_mut(1.0 / tr);
    // Rebuild exactly Hermitian / unit-trace so validation slack is spent on
    // genuine defects, not on accumulation in GG†.
    let rho = (&rho + rho.adjoint()).scale(0.5);
    let tr = rho.trace().re;
    DensityMatrix::new(rho.scale(1.0 / tr))
}

/// Standard normal via Box–Muller (keeps the dependency surface at `rand`).
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
