//! The nested random-access (information-causality) game.
//!
//! Alice holds n = 2^k uniform bits a⃗ and may send Bob one classical bit
//! (m = 1). Sharing k levels of two-gbit boxes, Bob can recover any single
//! a_i of his choosing with success probability (1 + E^k)/2, where E is the
//! shared box's CHSH correlator weight. The information extracted is
//!
//! ```text
//! I = Σ_i I(a_i : β | b = i)   →   analytic value  2^k · (1 − h((1+E^k)/2))
//! ```
//!
//! and the information-causality bound demands I ≤ m. For E above the
//! quantum value 1/√2 the analytic I exceeds 1 at some finite nesting depth k
//! (supra-quantum iff 2E² > 1); at E = 1/√2 it decreases monotonically toward
//! 1/(2·ln 2) ≈ 0.72, and the PR box (E = 1) reaches I = 2^k.
//!
//! For k = 1 the module also builds the explicit post-protocol *transcript
//! state* — Alice's bits, her message, and Bob's unmeasured box half — so the
//! entropic checkers can probe exactly where the proof chain snaps. Layout:
//! parties (a₀, a₁, x, Z_B) with a₀, a₁, x classical bits and Z_B a gbit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{binary_entropy, mutual_information};
use crate::error::{Error, Result};
use crate::state::{classical_bit, StateTable};
use crate::system::SystemType;
use crate::{ENTROPY_TOL, TABLE_TOL};

/// Transcript party index of Alice's first data bit.
pub const T_A0: usize = 0;
/// Transcript party index of Alice's second data bit.
pub const T_A1: usize = 1;
/// Transcript party index of the message bit x.
pub const T_MSG: usize = 2;
/// Transcript party index of Bob's unmeasured box half.
pub const T_BOB: usize = 3;

/// Deepest nesting level accepted anywhere in this module.
pub const MAX_K: usize = 40;

fn check_e(e: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&e) || !e.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "correlator weight E must lie in [0,1], got {e}"
        )));
    }
    Ok(())
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidParameter(format!(
            "nesting depth k must lie in 1..={MAX_K}, got {k}"
        )));
    }
    Ok(())
}

/// Analytic success probability (1 + E^k)/2 of guessing any one bit.
pub fn analytic_success(e: f64, k: usize) -> Result<f64> {
    check_e(e)?;
    check_k(k)?;
    Ok((1.0 + e.powi(k as i32)) / 2.0)
}

/// Analytic extracted information I = 2^k · (1 − h((1+E^k)/2)) in bits.
pub fn analytic_i(e: f64, k: usize) -> Result<f64> {
    let p = analytic_success(e, k)?;
    Ok((1u64 << k) as f64 * (1.0 - binary_entropy(p)?))
}

/// How a game evaluation is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum GameMode {
    /// Closed-form success and information.
    Analytic,
    /// Simulate the nested protocol with noisy boxes.
    MonteCarlo { trials: u64 },
}

/// Parameters of one game evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Box correlator weight E ∈ [0, 1].
    pub e: f64,
    /// Nesting depth; Alice holds 2^k bits.
    pub k: usize,
    pub mode: GameMode,
}

/// Outcome of one game evaluation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GameResult {
    /// Probability that Bob's guess matches the requested bit.
    pub success: f64,
    /// Extracted information I in bits.
    pub i_bits: f64,
    /// Number of Alice data bits, n = 2^k.
    pub n: usize,
    /// Message bits (always 1 here).
    pub m: usize,
}

/// Evaluate the game. Monte Carlo runs are deterministic in `seed`.
pub fn play(config: &GameConfig, seed: u64) -> Result<GameResult> {
    check_e(config.e)?;
    check_k(config.k)?;
    let n = 1usize << config.k;
    let (success, i_bits) = match config.mode {
        GameMode::Analytic => (
            analytic_success(config.e, config.k)?,
            analytic_i(config.e, config.k)?,
        ),
        GameMode::MonteCarlo { trials } => {
            let p = monte_carlo_success(config.e, config.k, trials, seed)?;
            // Plug-in estimate through the same information formula.
            (p, n as f64 * (1.0 - binary_entropy(p.clamp(0.0, 1.0))?))
        }
    };
    Ok(GameResult {
        success,
        i_bits,
        n,
        m: 1,
    })
}

/// Fraction of trials in which Bob's guess is correct when the nested
/// protocol runs on isotropic-E boxes (uniform data bits, uniform target).
pub fn monte_carlo_success(e: f64, k: usize, trials: u64, seed: u64) -> Result<f64> {
    check_e(e)?;
    check_k(k)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if k > 20 {
        return Err(Error::InvalidParameter(format!(
            "Monte Carlo allocates 2^k bits per trial; k = {k} exceeds 20"
        )));
    }
    let n = 1usize << k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = 0u64;
    let mut bits = vec![0u8; n];
    for _ in 0..trials {
        for b in &mut bits {
            *b = rng.random::<bool>() as u8;
        }
        let target = rng.random_range(0..n);
        if simulate_protocol(&bits, target, e, &mut rng) == bits[target] {
            wins += 1;
        }
    }
    Ok(wins as f64 / trials as f64)
}

/// One run of the nested protocol: returns Bob's guess for `bits[target]`.
///
/// At each level Alice pairs up her data, feeds a_even ⊕ a_odd into a box,
/// and forms the message bit x_t = a_even ⊕ A_t; the x_t's become the next
/// level's data. The base level sends its single bit physically. Bob undoes
/// one box per level: β = x̂_t ⊕ B_t with his setting b = parity of the
/// target index at that level.
fn simulate_protocol<R: Rng + ?Sized>(bits: &[u8], target: usize, e: f64, rng: &mut R) -> u8 {
    if bits.len() == 1 {
        return bits[0];
    }
    let mut xs = Vec::with_capacity(bits.len() / 2);
    let mut boxes = Vec::with_capacity(bits.len() / 2);
    for pair in bits.chunks_exact(2) {
        let j_a = pair[0] ^ pair[1];
        let a_out = rng.random::<bool>() as u8;
        xs.push(pair[0] ^ a_out);
        boxes.push((j_a, a_out));
    }
    let t = target / 2;
    let b = (target % 2) as u8;
    let x_hat = simulate_protocol(&xs, t, e, rng);
    let (j_a, a_out) = boxes[t];
    let aligned = rng.random::<f64>() < (1.0 + e) / 2.0;
    let b_out = a_out ^ (j_a & b) ^ !aligned as u8;
    x_hat ^ b_out
}

/// The k = 1 post-protocol state: (a₀, a₁, x, Z_B) with
/// P(a₀,a₁,x,z | j_B) = ¼ · P_box(a₀⊕x, z | a₀⊕a₁, j_B).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IcTranscript {
    /// Four-party table; see the module docs for the layout.
    pub state: StateTable,
    /// Alice data bits (n = 2).
    pub n: usize,
    /// Message bits (m = 1).
    pub m: usize,
}

/// Build the k = 1 transcript from any two-gbit box: condition Alice's box
/// half on each (input, outcome) branch and mix the resulting product states
/// with their branch probabilities.
pub fn transcript_from_box(box_state: &StateTable) -> Result<IcTranscript> {
    if box_state.system() != &SystemType::from_pairs(&[(2, 2), (2, 2)]) {
        return Err(Error::InvalidSystem(
            "the transcript construction needs a two-gbit box".into(),
        ));
    }
    let alice_marginal = box_state.marginal(&[0])?;
    let mut components: Vec<(f64, StateTable)> = Vec::with_capacity(16);
    for a0 in 0..2usize {
        for a1 in 0..2usize {
            let j_a = a0 ^ a1;
            for a_out in 0..2usize {
                let p_branch = 0.25 * alice_marginal.entry(j_a, a_out);
                if p_branch <= TABLE_TOL {
                    continue;
                }
                let bob_side = box_state.conditional_marginal(0, a_out, j_a)?;
                let x = a0 ^ a_out;
                let product = classical_bit(a0)
                    .tensor(&classical_bit(a1))
                    .tensor(&classical_bit(x))
                    .tensor(&bob_side);
                components.push((p_branch, product));
            }
        }
    }
    let refs: Vec<(f64, &StateTable)> = components.iter().map(|(w, s)| (*w, s)).collect();
    Ok(IcTranscript {
        state: StateTable::convex_mix(&refs)?,
        n: 2,
        m: 1,
    })
}

/// Bob's guessing pair for target bit i ∈ {0, 1}: measure Z_B at setting i,
/// output β = x ⊕ B, and keep (a_i, β) — a two-bit classical state.
pub fn guess_pair(t: &IcTranscript, i: usize) -> Result<StateTable> {
    if i > 1 {
        return Err(Error::InvalidParameter(format!(
            "target bit must be 0 or 1, got {i}"
        )));
    }
    // Measuring Z_B at setting i makes the whole table classical with a
    // single joint setting; then β = x ⊕ B is a deterministic function we
    // can sum out directly.
    let measured = crate::transform::apply_local_transformation(
        &t.state,
        &crate::transform::Transformation::Wiring {
            party: T_BOB,
            setting: i,
        },
    )?;
    let system = SystemType::from_pairs(&[(1, 2), (1, 2)]);
    let mut entries = vec![0.0f64; 4];
    for idx in 0..measured.system().n_outcomes() {
        let outs = measured.system().outcomes_of(idx);
        let a_i = outs[i];
        let beta = outs[T_MSG] ^ outs[T_BOB];
        entries[2 * a_i + beta] += measured.entry(0, idx);
    }
    StateTable::new(system, entries)
}

/// I = Σ_i I(a_i : β | b = i) from the explicit transcript, in bits.
pub fn i_from_transcript(t: &IcTranscript) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..2 {
        let pair = guess_pair(t, i)?;
        total += mutual_information(&pair, &[0], &[1])?;
    }
    Ok(total)
}

/// One sweep cell: the game at a given (E, k).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub e: f64,
    pub k: usize,
    pub success: f64,
    pub i_bits: f64,
    /// I/m; the information-causality bound is violated when this exceeds 1.
    pub i_over_m: f64,
}

/// Analytic sweep of the game over an E-grid and all depths k ≤ k_max.
pub fn ic_threshold_sweep(
    e_min: f64,
    e_max: f64,
    step: f64,
    k_max: usize,
) -> Result<Vec<SweepRow>> {
    check_e(e_min)?;
    check_e(e_max)?;
    check_k(k_max)?;
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidParameter(format!("step must be positive, got {step}")));
    }
    if e_min > e_max {
        return Err(Error::InvalidParameter(format!(
            "empty grid: e_min {e_min} > e_max {e_max}"
        )));
    }
    let mut rows = Vec::new();
    let n_steps = ((e_max - e_min) / step + 0.5).floor() as usize;
    for idx in 0..=n_steps {
        let e = (e_min + idx as f64 * step).min(e_max);
        for k in 1..=k_max {
            let success = analytic_success(e, k)?;
            let i_bits = analytic_i(e, k)?;
            rows.push(SweepRow {
                e,
                k,
                success,
                i_bits,
                i_over_m: i_bits,
            });
        }
    }
    Ok(rows)
}

/// One frontier cell: where (if anywhere) the bound first breaks at this E.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FrontierRow {
    pub e: f64,
    /// Smallest k ≤ k_max with I > m, if any.
    pub first_violating_k: Option<usize>,
    /// I at k_max (the trend when no violation is seen).
    pub i_at_k_max: f64,
    /// Whether I must eventually exceed m at *some* finite k: analytically,
    /// 2E² > 1. Decides cells the finite sweep leaves open.
    pub analytic_supra: bool,
}

/// Frontier of the information-causality violation over an E-grid.
pub fn ic_frontier(e_min: f64, e_max: f64, step: f64, k_max: usize) -> Result<Vec<FrontierRow>> {
    let rows = ic_threshold_sweep(e_min, e_max, step, k_max)?;
    let mut out: Vec<FrontierRow> = Vec::new();
    for row in rows {
        if out.last().map(|f: &FrontierRow| f.e) != Some(row.e) {
            out.push(FrontierRow {
                e: row.e,
                first_violating_k: None,
                i_at_k_max: 0.0,
                analytic_supra: 2.0 * row.e * row.e > 1.0 + ENTROPY_TOL,
            });
        }
        let cell = out.last_mut().expect("just pushed");
        if cell.first_violating_k.is_none() && row.i_over_m > 1.0 + ENTROPY_TOL {
            cell.first_violating_k = Some(row.k);
        }
        if row.k == k_max {
            cell.i_at_k_max = row.i_bits;
        }
    }
    Ok(out)
}

/// The best classical strategy's box: shared uniform randomness λ, both
/// parties answering λ regardless of setting — all four correlators +1,
/// CHSH score 3, and the game extracts exactly I = m = 1 bit.
pub fn classical_shared_randomness_box() -> StateTable {
    let system = SystemType::from_pairs(&[(2, 2), (2, 2)]);
    let mut entries = vec![0.0f64; 16];
    for j in 0..4 {
        for lambda in 0..2 {
            entries[j * 4 + 2 * lambda + lambda] = 0.5;
        }
    }
    StateTable::new(system, entries).expect("shared-randomness box is a valid table")
}
