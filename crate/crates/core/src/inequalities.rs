//! Checkers for the entropic inequalities and the proof chain they form.
//!
//! Every inequality is normalized to `lhs ≤ rhs` before reporting, so a
//! positive margin (lhs − rhs) always means *violated*:
//!
//! - **DPI**: H(A|B) ≤ H(A|T(B)) for a local operation T on B;
//! - **SSA**: H(A|CD) ≤ H(A|C), i.e. DPI with T = discard(D);
//! - **Lemma 1** (grouping): H(A₁…A_n|γ) ≤ Σᵢ H(Aᵢ|γ);
//! - **Lemma 2** (products): H(A⊗B) = H(A) + H(B), an equality;
//! - **Lemma 3** (classical nonnegativity): 0 ≤ H(X|Y) for classical X;
//! - **Lemma 4** (game bound): n − m ≤ H(a⃗|B x⃗) on a game transcript;
//! - **subadditivity**: H(AB) ≤ H(A) + H(B).
//!
//! [`trace_theorem2_chain`] strings the game-side steps together — Lemma 4,
//! Lemma 1, processing to Bob's guess, and finally I ≤ m — and reports the
//! first link that snaps. Classical and quantum boxes keep every link;
//! the PR box keeps Lemma 4 tight but breaks the Lemma 1 step.
//!
//! [`search_counterexamples`] drives the checkers over seeded random states,
//! partitions, and transformations, returning the largest margin found.
//! Known extremal candidates (the three-party conditional-entropy
//! counterexample, game transcripts) are planted in the first trials so the
//! search space provably contains them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{
    check_bipartition, conditional_entropy_detailed, measurement_entropy, CondEntropy,
};
use crate::error::{Error, Result};
use crate::icgame::{
    classical_shared_randomness_box, guess_pair, transcript_from_box, IcTranscript, T_A0, T_A1,
};
use crate::report::{CheckReport, Verdict, Witness};
use crate::sampler::{random_stochastic_matrix, sample_boxworld_state};
use crate::state::{build_named_state, NamedState, StateTable};
use crate::system::{complement, validate_subset, SystemType};
use crate::transform::Transformation;
use crate::{ENTROPY_TOL, TABLE_TOL};

fn argmin_entry(term: &str, value: &CondEntropy) -> [(String, String); 2] {
    [
        (format!("{term}:joint"), value.joint.argmin.label().to_string()),
        (format!("{term}:reduced"), value.reduced.argmin.label().to_string()),
    ]
}

/// Data-processing inequality H(A|B) ≤ H(A|T(B)).
///
/// `a` and `b` must partition the parties of `s`; `t` may only touch
/// parties in `b` (anything it appends — independent systems, classical
/// clones — lands on B's side as well).
pub fn check_dpi(
    s: &StateTable,
    a: &[usize],
    b: &[usize],
    t: &Transformation,
) -> Result<CheckReport> {
    check_bipartition(s, a, b)?;
    for target in t.targets() {
        if !b.contains(&target) {
            return Err(Error::PartySelection(format!(
                "transformation touches party {target}, which is not in B = {b:?}"
            )));
        }
    }
    let before = conditional_entropy_detailed(s, a, b)?;
    let after_state = t.apply(s)?;
    let (map, n_after) = t.party_map(s.n_parties());
    let mut a_after: Vec<usize> = a
        .iter()
        .map(|&p| map[p].expect("A is untouched by a B-local transformation"))
        .collect();
    a_after.sort_unstable();
    let b_after = complement(&a_after, n_after);
    let after = conditional_entropy_detailed(&after_state, &a_after, &b_after)?;

    let mut argmin = Vec::with_capacity(4);
    argmin.extend(argmin_entry("H(A|B)", &before));
    argmin.extend(argmin_entry("H(A|B')", &after));
    let witness = Witness {
        state: Some(s.clone()),
        state_after: Some(after_state),
        a: Some(a.to_vec()),
        b: Some(b.to_vec()),
        transformation: Some(t.clone()),
        argmin,
        ..Witness::default()
    };
    Ok(CheckReport::inequality(
        "dpi",
        before.bits,
        after.bits,
        ENTROPY_TOL,
        witness,
    ))
}

/// Strong subadditivity H(A|CD) ≤ H(A|C) on the marginal over A∪C∪D,
/// checked as DPI with T = discard(D).
pub fn check_ssa(s: &StateTable, a: &[usize], c: &[usize], d: &[usize]) -> Result<CheckReport> {
    validate_subset(a, s.n_parties())?;
    validate_subset(c, s.n_parties())?;
    validate_subset(d, s.n_parties())?;
    if a.is_empty() || d.is_empty() {
        return Err(Error::PartySelection(
            "SSA needs nonempty A and D subsets".into(),
        ));
    }
    let mut keep: Vec<usize> = a.iter().chain(c).chain(d).copied().collect();
    keep.sort_unstable();
    if keep.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::PartySelection(format!(
            "A={a:?}, C={c:?}, D={d:?} must be disjoint"
        )));
    }
    let reduced = s.marginal(&keep)?;
    let pos = |p: usize| keep.binary_search(&p).expect("member of keep");
    let a_pos: Vec<usize> = a.iter().map(|&p| pos(p)).collect();
    let mut b_pos: Vec<usize> = c.iter().chain(d).map(|&p| pos(p)).collect();
    b_pos.sort_unstable();
    let d_pos: Vec<usize> = d.iter().map(|&p| pos(p)).collect();

    let mut report = check_dpi(
        &reduced,
        &a_pos,
        &b_pos,
        &Transformation::Discard { parties: d_pos },
    )?;
    report.name = "ssa".into();
    report.witness.state = Some(s.clone());
    report.witness.a = Some(a.to_vec());
    report.witness.b = None;
    report.witness.c = Some(c.to_vec());
    report.witness.d = Some(d.to_vec());
    Ok(report)
}

/// Subadditivity H(AB) ≤ H(A) + H(B) over a bipartition of all parties.
pub fn check_subadditivity(s: &StateTable, a: &[usize], b: &[usize]) -> Result<CheckReport> {
    check_bipartition(s, a, b)?;
    let joint = measurement_entropy(s)?;
    let ha = measurement_entropy(&s.marginal(a)?)?;
    let hb = measurement_entropy(&s.marginal(b)?)?;
    let witness = Witness {
        state: Some(s.clone()),
        a: Some(a.to_vec()),
        b: Some(b.to_vec()),
        argmin: vec![
            ("H(AB)".into(), joint.argmin.label().into()),
            ("H(A)".into(), ha.argmin.label().into()),
            ("H(B)".into(), hb.argmin.label().into()),
        ],
        ..Witness::default()
    };
    Ok(CheckReport::inequality(
        "subadditivity",
        joint.bits,
        ha.bits + hb.bits,
        ENTROPY_TOL,
        witness,
    ))
}

/// Parameters for [`check_lemma`]; the variant must match the lemma number.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum LemmaParams {
    /// Lemma 1: disjoint outcome groups A₁…A_n and the conditioning rest γ.
    Grouping {
        groups: Vec<Vec<usize>>,
        gamma: Vec<usize>,
    },
    /// Lemma 2: the product bipartition.
    Bipartition { a: Vec<usize>, b: Vec<usize> },
    /// Lemma 3: classical parties X and the rest Y.
    ClassicalConditional { x: Vec<usize>, y: Vec<usize> },
    /// Lemma 4: declared game dimensions (n data bits, m message bits).
    Game { n: usize, m: usize },
}

/// Check one of the four lemmas on a state.
pub fn check_lemma(s: &StateTable, which: u8, params: &LemmaParams) -> Result<CheckReport> {
    match (which, params) {
        (1, LemmaParams::Grouping { groups, gamma }) => lemma1(s, groups, gamma),
        (2, LemmaParams::Bipartition { a, b }) => lemma2(s, a, b),
        (3, LemmaParams::ClassicalConditional { x, y }) => lemma3(s, x, y),
        (4, LemmaParams::Game { n, m }) => lemma4(s, *n, *m),
        (1..=4, _) => Err(Error::InvalidParameter(format!(
            "lemma {which} does not take {params:?}"
        ))),
        _ => Err(Error::InvalidParameter(format!(
            "no lemma {which}; expected 1..=4"
        ))),
    }
}

/// Lemma 1: H(A₁…A_n|γ) ≤ Σᵢ H(Aᵢ|γ).
fn lemma1(s: &StateTable, groups: &[Vec<usize>], gamma: &[usize]) -> Result<CheckReport> {
    if groups.is_empty() || groups.iter().any(Vec::is_empty) {
        return Err(Error::PartySelection(
            "lemma 1 needs at least one nonempty group".into(),
        ));
    }
    validate_subset(gamma, s.n_parties())?;
    let mut all: Vec<usize> = groups.iter().flatten().chain(gamma).copied().collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) || all.len() != s.n_parties() {
        return Err(Error::PartySelection(format!(
            "groups {groups:?} and gamma {gamma:?} must partition all {} parties",
            s.n_parties()
        )));
    }

    let mut union: Vec<usize> = groups.iter().flatten().copied().collect();
    union.sort_unstable();
    let joint = conditional_entropy_detailed(s, &union, gamma)?;
    let mut argmin = Vec::new();
    argmin.extend(argmin_entry("H(A|gamma)", &joint));

    let mut sum = 0.0;
    for (idx, group) in groups.iter().enumerate() {
        let mut keep: Vec<usize> = group.iter().chain(gamma).copied().collect();
        keep.sort_unstable();
        let reduced = s.marginal(&keep)?;
        let pos = |p: usize| keep.binary_search(&p).expect("member of keep");
        let g_pos: Vec<usize> = group.iter().map(|&p| pos(p)).collect();
        let gamma_pos: Vec<usize> = gamma.iter().map(|&p| pos(p)).collect();
        let term = conditional_entropy_detailed(&reduced, &g_pos, &gamma_pos)?;
        argmin.extend(argmin_entry(&format!("H(A{idx}|gamma)"), &term));
        sum += term.bits;
    }

    let witness = Witness {
        state: Some(s.clone()),
        groups: Some(groups.to_vec()),
        gamma: Some(gamma.to_vec()),
        argmin,
        ..Witness::default()
    };
    Ok(CheckReport::inequality(
        "lemma1",
        joint.bits,
        sum,
        ENTROPY_TOL,
        witness,
    ))
}

/// Lemma 2: H(A⊗B) = H(A) + H(B); requires the state to actually factor.
fn lemma2(s: &StateTable, a: &[usize], b: &[usize]) -> Result<CheckReport> {
    check_bipartition(s, a, b)?;
    let ma = s.marginal(a)?;
    let mb = s.marginal(b)?;
    // Rebuild the product in the original party order and insist it matches.
    let tensored = ma.tensor(&mb);
    let order: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut perm = vec![0usize; order.len()];
    for (tensor_pos, &home) in order.iter().enumerate() {
        perm[home] = tensor_pos;
    }
    let product = tensored.permute_parties(&perm)?;
    let defect = s
        .entries()
        .iter()
        .zip(product.entries())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if defect > TABLE_TOL {
        return Err(Error::InvalidParameter(format!(
            "lemma 2 needs a product state across A={a:?} / B={b:?}; max deviation {defect:e}"
        )));
    }

    let joint = measurement_entropy(s)?;
    let ha = measurement_entropy(&ma)?;
    let hb = measurement_entropy(&mb)?;
    let witness = Witness {
        state: Some(s.clone()),
        a: Some(a.to_vec()),
        b: Some(b.to_vec()),
        argmin: vec![
            ("H(AB)".into(), joint.argmin.label().into()),
            ("H(A)".into(), ha.argmin.label().into()),
            ("H(B)".into(), hb.argmin.label().into()),
        ],
        ..Witness::default()
    };
    Ok(CheckReport::equality(
        "lemma2",
        joint.bits,
        ha.bits + hb.bits,
        ENTROPY_TOL,
        witness,
    ))
}

/// Lemma 3: 0 ≤ H(X|Y) for classical X.
fn lemma3(s: &StateTable, x: &[usize], y: &[usize]) -> Result<CheckReport> {
    check_bipartition(s, x, y)?;
    for &p in x {
        if !s.system().parties[p].is_classical() {
            return Err(Error::NotClassical {
                party: p,
                settings: s.system().parties[p].settings,
            });
        }
    }
    let cond = conditional_entropy_detailed(s, x, y)?;
    let mut argmin = Vec::new();
    argmin.extend(argmin_entry("H(X|Y)", &cond));
    let witness = Witness {
        state: Some(s.clone()),
        a: Some(x.to_vec()),
        b: Some(y.to_vec()),
        argmin,
        ..Witness::default()
    };
    Ok(CheckReport::inequality(
        "lemma3",
        0.0,
        cond.bits,
        ENTROPY_TOL,
        witness,
    ))
}

fn transcript_system() -> SystemType {
    SystemType::from_pairs(&[(1, 2), (1, 2), (1, 2), (2, 2)])
}

/// Lemma 4: n − m ≤ H(a⃗|B x⃗) on a k = 1 game transcript.
fn lemma4(s: &StateTable, n: usize, m: usize) -> Result<CheckReport> {
    if s.system() != &transcript_system() {
        return Err(Error::InvalidSystem(
            "lemma 4 expects a game transcript: parties (a0, a1, x, Z_B)".into(),
        ));
    }
    if n != 2 || m != 1 {
        return Err(Error::InvalidParameter(format!(
            "a one-box transcript has n = 2, m = 1; got n = {n}, m = {m}"
        )));
    }
    let cond = conditional_entropy_detailed(s, &[T_A0, T_A1], &[2, 3])?;
    let mut argmin = Vec::new();
    argmin.extend(argmin_entry("H(a|Bx)", &cond));
    let witness = Witness {
        state: Some(s.clone()),
        n: Some(n),
        m: Some(m),
        argmin,
        ..Witness::default()
    };
    Ok(CheckReport::inequality(
        "lemma4",
        (n - m) as f64,
        cond.bits,
        ENTROPY_TOL,
        witness,
    ))
}

/// The numeric trace of the Theorem-2 proof chain on one game transcript.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProofChainTrace {
    /// In proof order: lemma4, lemma1, dpi_guess, ic_bound.
    pub steps: Vec<CheckReport>,
    /// The game information I = Σᵢ I(aᵢ : β | b = i) in bits.
    pub i_bits: f64,
    /// The message budget m.
    pub m: usize,
    /// Index into `steps` of the first violated step, if any.
    pub first_failing: Option<usize>,
}

impl ProofChainTrace {
    pub fn first_failing_name(&self) -> Option<&str> {
        self.first_failing.map(|i| self.steps[i].name.as_str())
    }

    pub fn all_hold(&self) -> bool {
        self.first_failing.is_none()
    }
}

/// Evaluate the proof chain of the I ≤ m bound on a transcript:
///
/// 1. `lemma4`:    n − m ≤ H(a⃗|Bx⃗)
/// 2. `lemma1`:    H(a⃗|Bx⃗) ≤ Σᵢ H(aᵢ|Bx⃗)
/// 3. `dpi_guess`: Σᵢ H(aᵢ|Bx⃗) ≤ Σᵢ H(aᵢ|β(i))   (processing B to the guess)
/// 4. `ic_bound`:  I ≤ m, where I = Σᵢ [H(aᵢ) − H(aᵢ|β(i))]
///
/// If steps 1–3 all hold, step 4 must (the a_i are uniform bits, so
/// I = n − Σᵢ H(aᵢ|β(i)) ≤ n − (n − m) = m).
pub fn trace_theorem2_chain(t: &IcTranscript, n: usize, m: usize) -> Result<ProofChainTrace> {
    if n != t.n || m != t.m {
        return Err(Error::InvalidParameter(format!(
            "declared (n, m) = ({n}, {m}) but the transcript has ({}, {})",
            t.n, t.m
        )));
    }
    let lemma4_step = check_lemma(&t.state, 4, &LemmaParams::Game { n, m })?;
    let lemma1_step = check_lemma(
        &t.state,
        1,
        &LemmaParams::Grouping {
            groups: vec![vec![T_A0], vec![T_A1]],
            gamma: vec![2, 3],
        },
    )?;

    // Step 3: compare Σᵢ H(aᵢ|Bx⃗) with Σᵢ H(aᵢ|β(i)) after Bob processes
    // (x, Z_B) into his guess for bit i.
    let sum_cond_box = lemma1_step.rhs_bits;
    let mut sum_cond_guess = 0.0;
    let mut i_bits = 0.0;
    let mut argmin = Vec::new();
    for i in 0..2usize {
        let pair = guess_pair(t, i)?;
        let cond = conditional_entropy_detailed(&pair, &[0], &[1])?;
        let h_ai = measurement_entropy(&pair.marginal(&[0])?)?.bits;
        sum_cond_guess += cond.bits;
        i_bits += h_ai - cond.bits;
        argmin.extend(argmin_entry(&format!("H(a{i}|beta)"), &cond));
    }
    let dpi_guess_step = CheckReport::inequality(
        "dpi_guess",
        sum_cond_box,
        sum_cond_guess,
        ENTROPY_TOL,
        Witness {
            state: Some(t.state.clone()),
            argmin,
            note: Some("beta(i) = x xor (Z_B measured at setting i)".into()),
            ..Witness::default()
        },
    );

    let ic_step = CheckReport::inequality(
        "ic_bound",
        i_bits,
        m as f64,
        ENTROPY_TOL,
        Witness {
            n: Some(n),
            m: Some(m),
            note: Some("I = sum_i I(a_i : beta | b = i)".into()),
            ..Witness::default()
        },
    );

    let steps = vec![lemma4_step, lemma1_step, dpi_guess_step, ic_step];
    let first_failing = steps.iter().position(|s| s.verdict == Verdict::Violated);
    Ok(ProofChainTrace {
        steps,
        i_bits,
        m,
        first_failing,
    })
}

/// Which inequality a randomized search drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityKind {
    Dpi,
    Ssa,
    Lemma1,
    Lemma3,
    Subadditivity,
}

impl InequalityKind {
    pub fn name(self) -> &'static str {
        match self {
            InequalityKind::Dpi => "dpi",
            InequalityKind::Ssa => "ssa",
            InequalityKind::Lemma1 => "lemma1",
            InequalityKind::Lemma3 => "lemma3",
            InequalityKind::Subadditivity => "subadditivity",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dpi" => Ok(InequalityKind::Dpi),
            "ssa" => Ok(InequalityKind::Ssa),
            "lemma1" => Ok(InequalityKind::Lemma1),
            "lemma3" => Ok(InequalityKind::Lemma3),
            "subadditivity" => Ok(InequalityKind::Subadditivity),
            other => Err(Error::InvalidParameter(format!(
                "unknown inequality {other:?}; expected dpi, ssa, lemma1, lemma3, or subadditivity"
            ))),
        }
    }

    /// The system the search samples when none is supplied.
    pub fn default_system(self) -> SystemType {
        match self {
            InequalityKind::Dpi | InequalityKind::Ssa => {
                SystemType::from_pairs(&[(1, 2), (1, 2), (2, 2)])
            }
            InequalityKind::Lemma1 => transcript_system(),
            InequalityKind::Lemma3 => SystemType::from_pairs(&[(1, 2), (2, 2), (2, 2)]),
            InequalityKind::Subadditivity => SystemType::from_pairs(&[(2, 2), (2, 2)]),
        }
    }
}

/// Configuration of a randomized counterexample search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub kind: InequalityKind,
    pub trials: u64,
    pub seed: u64,
    /// Sampling system; defaults per kind (see
    /// [`InequalityKind::default_system`]).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemType>,
}

/// Result of a randomized search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// The report with the largest margin (ties: lowest trial index).
    pub best: CheckReport,
    pub n_trials: u64,
    /// Number of trials whose verdict was `violated`.
    pub n_violations: u64,
}

/// Randomized counterexample search: `trials` independent attempts, each
/// deterministically seeded with `seed ⊕ trial`, run in parallel and reduced
/// to the largest-margin report. Known extremal candidates occupy the first
/// trials of their search space, so landmark violations are found by
/// construction, not by luck.
pub fn search_counterexamples(config: &SearchConfig) -> Result<SearchOutcome> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("search needs at least one trial".into()));
    }
    let system = config
        .system
        .clone()
        .unwrap_or_else(|| config.kind.default_system());
    system.validate()?;
    if config.kind == InequalityKind::Lemma3
        && !system.parties.iter().any(|p| p.is_classical())
    {
        return Err(Error::InvalidSystem(
            "lemma 3 search needs at least one classical party".into(),
        ));
    }

    let reports: Vec<(u64, CheckReport)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = config.seed ^ trial;
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            run_trial(config.kind, &system, trial, &mut rng).map(|mut report| {
                report.witness.trial = Some(trial);
                report.witness.seed = Some(trial_seed);
                (trial, report)
            })
        })
        .collect::<Result<_>>()?;

    let n_violations = reports
        .iter()
        .filter(|(_, r)| r.verdict == Verdict::Violated)
        .count() as u64;
    let best = reports
        .into_iter()
        .reduce(|x, y| {
            // Largest margin wins; ties go to the earliest trial.
            if y.1.margin > x.1.margin || (y.1.margin == x.1.margin && y.0 < x.0) {
                y
            } else {
                x
            }
        })
        .expect("at least one trial")
        .1;
    Ok(SearchOutcome {
        best,
        n_trials: config.trials,
        n_violations,
    })
}

fn run_trial<R: Rng + ?Sized>(
    kind: InequalityKind,
    system: &SystemType,
    trial: u64,
    rng: &mut R,
) -> Result<CheckReport> {
    match kind {
        InequalityKind::Dpi => dpi_trial(system, trial, rng),
        InequalityKind::Ssa => ssa_trial(system, trial, rng),
        InequalityKind::Lemma1 => lemma1_trial(system, trial, rng),
        InequalityKind::Lemma3 => lemma3_trial(system, rng),
        InequalityKind::Subadditivity => {
            let s = sample_boxworld_state(system, rng)?;
            let (a, b) = random_bipartition(system.n_parties(), rng);
            check_subadditivity(&s, &a, &b)
        }
    }
}

fn ssa_system() -> SystemType {
    SystemType::from_pairs(&[(1, 2), (1, 2), (2, 2)])
}

fn dpi_trial<R: Rng + ?Sized>(
    system: &SystemType,
    trial: u64,
    rng: &mut R,
) -> Result<CheckReport> {
    // Plant the known conditional-entropy counterexample first.
    if trial == 0 && system == &ssa_system() {
        let s = build_named_state(&NamedState::SsaExample)?;
        return check_dpi(&s, &[0], &[1, 2], &Transformation::Discard { parties: vec![1] });
    }
    let s = sample_boxworld_state(system, rng)?;
    let (a, b) = random_bipartition(system.n_parties(), rng);
    let t = random_transformation(system, &b, rng);
    check_dpi(&s, &a, &b, &t)
}

fn ssa_trial<R: Rng + ?Sized>(
    system: &SystemType,
    trial: u64,
    rng: &mut R,
) -> Result<CheckReport> {
    if trial == 0 && system == &ssa_system() {
        let s = build_named_state(&NamedState::SsaExample)?;
        return check_ssa(&s, &[0], &[2], &[1]);
    }
    let s = sample_boxworld_state(system, rng)?;
    // Random roles: every party lands in A, C, or D; A and D must be
    // nonempty (C may be empty — then SSA degenerates to "conditioning
    // cannot raise entropy").
    let n = system.n_parties();
    loop {
        let mut a = Vec::new();
        let mut c = Vec::new();
        let mut d = Vec::new();
        for p in 0..n {
            match rng.random_range(0..3u8) {
                0 => a.push(p),
                1 => c.push(p),
                _ => d.push(p),
            }
        }
        if !a.is_empty() && !d.is_empty() {
            return check_ssa(&s, &a, &c, &d);
        }
    }
}

fn lemma1_trial<R: Rng + ?Sized>(
    system: &SystemType,
    trial: u64,
    rng: &mut R,
) -> Result<CheckReport> {
    if system == &transcript_system() {
        // Transcript space: the state is a game transcript of some two-gbit
        // box; the canonical grouping probes the proof-chain step.
        let box_state = match trial {
            0 => build_named_state(&NamedState::PrBox)?,
            1 => classical_shared_randomness_box(),
            _ => sample_boxworld_state(&SystemType::from_pairs(&[(2, 2), (2, 2)]), rng)?,
        };
        let t = transcript_from_box(&box_state)?;
        return check_lemma(
            &t.state,
            1,
            &LemmaParams::Grouping {
                groups: vec![vec![T_A0], vec![T_A1]],
                gamma: vec![2, 3],
            },
        );
    }
    let s = sample_boxworld_state(system, rng)?;
    // Random γ (proper subset, may be empty); remaining parties are their
    // own singleton groups.
    let n = system.n_parties();
    let gamma_mask = rng.random_range(0..(1u32 << n) - 1) as usize;
    let gamma: Vec<usize> = (0..n).filter(|p| gamma_mask >> p & 1 == 1).collect();
    let groups: Vec<Vec<usize>> = (0..n)
        .filter(|p| gamma_mask >> p & 1 == 0)
        .map(|p| vec![p])
        .collect();
    check_lemma(&s, 1, &LemmaParams::Grouping { groups, gamma })
}

fn lemma3_trial<R: Rng + ?Sized>(system: &SystemType, rng: &mut R) -> Result<CheckReport> {
    let s = sample_boxworld_state(system, rng)?;
    // X: a random nonempty subset of the classical parties; Y: the rest.
    let classical: Vec<usize> = (0..system.n_parties())
        .filter(|&p| system.parties[p].is_classical())
        .collect();
    let mask = rng.random_range(1..(1u32 << classical.len())) as usize;
    let x: Vec<usize> = classical
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &p)| p)
        .collect();
    let y = complement(&x, system.n_parties());
    check_lemma(&s, 3, &LemmaParams::ClassicalConditional { x, y })
}

fn random_bipartition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
    debug_assert!(n >= 2);
    let mask = rng.random_range(1..(1u32 << n) - 1) as usize;
    let a: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
    let b = complement(&a, n);
    (a, b)
}

/// A random transformation local to `b` (uniform over the applicable kinds).
fn random_transformation<R: Rng + ?Sized>(
    system: &SystemType,
    b: &[usize],
    rng: &mut R,
) -> Transformation {
    let classical_in_b: Vec<usize> = b
        .iter()
        .copied()
        .filter(|&p| system.parties[p].is_classical())
        .collect();
    let measurable_in_b: Vec<usize> = b
        .iter()
        .copied()
        .filter(|&p| system.parties[p].settings >= 2)
        .collect();
    loop {
        match rng.random_range(0..4u8) {
            0 => {
                // Discard a random nonempty subset of B.
                let mask = rng.random_range(1..(1u64 << b.len())) as usize;
                let parties: Vec<usize> = b
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                return Transformation::Discard { parties };
            }
            1 if !measurable_in_b.is_empty() => {
                let party = measurable_in_b[rng.random_range(0..measurable_in_b.len())];
                let setting = rng.random_range(0..system.parties[party].settings);
                return Transformation::Wiring { party, setting };
            }
            2 if !classical_in_b.is_empty() => {
                let party = classical_in_b[rng.random_range(0..classical_in_b.len())];
                let d_in = system.parties[party].outcomes;
                let d_out = rng.random_range(1..=d_in + 1);
                return Transformation::ClassicalProcessing {
                    party,
                    matrix: random_stochastic_matrix(d_out, d_in, rng),
                };
            }
            3 if !classical_in_b.is_empty() => {
                let party = classical_in_b[rng.random_range(0..classical_in_b.len())];
                return Transformation::CloneClassical { party };
            }
            _ => {}
        }
    }
}
