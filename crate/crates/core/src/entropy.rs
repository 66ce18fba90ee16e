//! Measurement entropy by explicit minimization.
//!
//! The entropy of a state table P is
//!
//! ```text
//! H(P) = min_{M ∈ M*} H_Sh(outcome distribution of M on P)        (base-2)
//! ```
//!
//! where M* is the family of fine-grained measurements built by wiring local
//! fiducial measurements together:
//!
//! - **non-adaptive**: one product measurement per joint fiducial setting j⃗;
//!   outcome i⃗ has probability P(i⃗|j⃗);
//! - **adaptive** (systems of ≤ 3 parties): sequential wirings — parties are
//!   measured in some order and each later party's setting may depend on the
//!   earlier outcomes. Every such measurement is determined by its *plan*, the
//!   map from full outcome tuple I to the joint setting J(I) it was obtained
//!   under; the effect for outcome I is the indicator of cell (J(I), I).
//!
//! Duplicate measurements (identical effect sets, e.g. a constant-response
//! wiring generated from two measurement orders) are removed. Ties in the
//! minimization are broken by lexicographic label order.
//!
//! Conditional entropy is *defined* as H(A|B) = H(AB) − H(B) and mutual
//! information as I(A:B) = H(A) + H(B) − H(AB); checkers never compute them
//! any other way.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateTable;
use crate::system::{complement, rank, validate_subset, SystemType};
use crate::TABLE_TOL;

/// Adaptive wirings are enumerated for systems of at most this many parties;
/// larger systems fall back to non-adaptive products.
pub const ADAPTIVE_PARTY_LIMIT: usize = 3;

/// Hard cap on the number of decision trees enumerated per measurement order.
const MAX_TREES: u128 = 1 << 20;

/// Shannon entropy in bits of a probability vector.
///
/// Entries must be in [0,1] and sum to 1, both within [`TABLE_TOL`];
/// zero entries contribute zero.
pub fn shannon_entropy(dist: &[f64]) -> Result<f64> {
    let mut sum = 0.0f64;
    for &p in dist {
        if !(-TABLE_TOL..=1.0 + TABLE_TOL).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "entry {p} outside [0,1]"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > TABLE_TOL * dist.len().max(1) as f64 {
        return Err(Error::InvalidDistribution(format!(
            "distribution sums to {sum}, must be 1"
        )));
    }
    let mut h = 0.0f64;
    for &p in dist {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    // Float drift on near-1 entries can leave a −1e−16 residue; entropy is
    // nonnegative by definition.
    Ok(h.max(0.0))
}

/// Binary entropy h(p) = −p·log₂p − (1−p)·log₂(1−p).
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-TABLE_TOL..=1.0 + TABLE_TOL).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "binary entropy argument {p} outside [0,1]"
        )));
    }
    shannon_entropy(&[p.clamp(0.0, 1.0), (1.0 - p).clamp(0.0, 1.0)])
}

/// A linear functional on state tables: weights over the (j⃗, i⃗) cell space,
/// `R·P = Σ_{J,I} weights[J·n_outcomes + I] · P(I|J)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    system: SystemType,
    weights: Vec<f64>,
}

impl Effect {
    pub fn new(system: SystemType, weights: Vec<f64>) -> Result<Self> {
        system.validate()?;
        if weights.len() != system.n_settings() * system.n_outcomes() {
            return Err(Error::DimensionMismatch(format!(
                "effect has {} weights, system needs {}",
                weights.len(),
                system.n_settings() * system.n_outcomes()
            )));
        }
        Ok(Self { system, weights })
    }

    /// Indicator of the single cell (J, I): the fiducial effect "outcome I
    /// under joint setting J".
    pub fn indicator(system: SystemType, j: usize, i: usize) -> Self {
        let mut weights = vec![0.0f64; system.n_settings() * system.n_outcomes()];
        weights[j * system.n_outcomes() + i] = 1.0;
        Self { system, weights }
    }

    pub fn system(&self) -> &SystemType {
        &self.system
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// R·P.
    pub fn apply(&self, s: &StateTable) -> Result<f64> {
        if s.system() != &self.system {
            return Err(Error::DimensionMismatch(
                "effect and state live on different systems".into(),
            ));
        }
        Ok(self
            .weights
            .iter()
            .zip(s.entries())
            .map(|(w, p)| w * p)
            .sum())
    }
}

/// A fine-grained measurement from the wiring family, stored by its plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    system: SystemType,
    /// `plan[I]` = joint setting index J under which outcome I is collected.
    plan: Vec<usize>,
    label: String,
    fine_grained: bool,
}

impl Measurement {
    pub fn system(&self) -> &SystemType {
        &self.system
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn fine_grained(&self) -> bool {
        self.fine_grained
    }

    pub fn n_outcomes(&self) -> usize {
        self.plan.len()
    }

    pub fn plan(&self) -> &[usize] {
        &self.plan
    }

    /// The outcome effects: indicator of cell (plan[I], I) for each I.
    pub fn effects(&self) -> Vec<Effect> {
        self.plan
            .iter()
            .enumerate()
            .map(|(i, &j)| Effect::indicator(self.system.clone(), j, i))
            .collect()
    }

    /// Outcome distribution of this measurement on `s`: the vector of R_I·P.
    pub fn outcome_distribution(&self, s: &StateTable) -> Result<Vec<f64>> {
        if s.system() != &self.system {
            return Err(Error::DimensionMismatch(
                "measurement and state live on different systems".into(),
            ));
        }
        Ok(self
            .plan
            .iter()
            .enumerate()
            .map(|(i, &j)| s.entry(j, i))
            .collect())
    }

    fn from_plan(system: SystemType, plan: Vec<usize>) -> Self {
        let constant = plan.windows(2).all(|w| w[0] == w[1]);
        let label = if constant {
            let settings = system.settings_of(plan.first().copied().unwrap_or(0));
            format!(
                "fiducial[{}]",
                settings.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            )
        } else {
            format!(
                "wiring[{}]",
                plan.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            )
        };
        Self {
            system,
            plan,
            label,
            fine_grained: true,
        }
    }
}

/// Free-function form of [`Measurement::outcome_distribution`].
pub fn outcome_distribution(s: &StateTable, m: &Measurement) -> Result<Vec<f64>> {
    m.outcome_distribution(s)
}

/// Enumerate the fine-grained measurement family on a system.
///
/// Non-adaptive: one product measurement per joint setting. Adaptive
/// (≤ [`ADAPTIVE_PARTY_LIMIT`] parties): all sequential wirings, deduplicated
/// by plan, sorted by label.
pub fn enumerate_fine_grained(system: &SystemType, adaptive: bool) -> Result<Vec<Measurement>> {
    system.validate()?;
    let n_outcomes = system.n_outcomes();
    let mut plans: BTreeSet<Vec<usize>> = BTreeSet::new();

    if !adaptive || system.n_parties() <= 1 {
        // Single-party (and vacuum) wirings degenerate to fiducials.
        if adaptive && system.n_parties() > ADAPTIVE_PARTY_LIMIT {
            return Err(Error::TooManyParties {
                max: ADAPTIVE_PARTY_LIMIT,
                got: system.n_parties(),
            });
        }
        for j in 0..system.n_settings() {
            plans.insert(vec![j; n_outcomes]);
        }
    } else {
        let n = system.n_parties();
        if n > ADAPTIVE_PARTY_LIMIT {
            return Err(Error::TooManyParties { max: ADAPTIVE_PARTY_LIMIT, got: n });
        }
        for order in permutations(n) {
            enumerate_order_plans(system, &order, &mut plans)?;
        }
    }

    let mut out: Vec<Measurement> = plans
        .into_iter()
        .map(|plan| Measurement::from_plan(system.clone(), plan))
        .collect();
    out.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(out)
}

/// All sequential-wiring plans for one measurement order.
///
/// Position t in `order` measures party `order[t]`; its setting is an
/// arbitrary function of the outcomes at positions 0..t. The decision tree is
/// the tuple of those functions; each tree induces the plan I ↦ J(I).
fn enumerate_order_plans(
    system: &SystemType,
    order: &[usize],
    plans: &mut BTreeSet<Vec<usize>>,
) -> Result<()> {
    let n = order.len();
    let n_outcomes = system.n_outcomes();
    // Cells of the decision tree: (position t, outcome-prefix index) with
    // radix k_{order[t]} each; a tree is one choice per cell.
    let mut cell_radix: Vec<usize> = Vec::new();
    let mut cell_offset = vec![0usize; n]; // first cell of position t
    let mut prefix_size = vec![1usize; n]; // Π_{u<t} l_{order[u]}
    for t in 0..n {
        cell_offset[t] = cell_radix.len();
        if t > 0 {
            prefix_size[t] = prefix_size[t - 1] * system.parties[order[t - 1]].outcomes;
        }
        let k = system.parties[order[t]].settings;
        for _ in 0..prefix_size[t] {
            cell_radix.push(k);
        }
    }
    let n_trees: u128 = cell_radix.iter().map(|&k| k as u128).product();
    if n_trees > MAX_TREES {
        return Err(Error::InvalidParameter(format!(
            "adaptive enumeration would visit {n_trees} decision trees (cap {MAX_TREES})"
        )));
    }

    let prefix_radices: Vec<Vec<usize>> = (0..n)
        .map(|t| order[..t].iter().map(|&p| system.parties[p].outcomes).collect())
        .collect();

    let mut tree = vec![0usize; cell_radix.len()];
    loop {
        // Plan induced by this tree.
        let mut plan = vec![0usize; n_outcomes];
        let mut settings = vec![0usize; n];
        for (i, slot) in plan.iter_mut().enumerate() {
            let outs = system.outcomes_of(i);
            for t in 0..n {
                let prefix: Vec<usize> = order[..t].iter().map(|&p| outs[p]).collect();
                let prefix_idx = rank(&prefix_radices[t], &prefix);
                settings[order[t]] = tree[cell_offset[t] + prefix_idx];
            }
            *slot = system.setting_index(&settings);
        }
        plans.insert(plan);

        // Odometer step over the tree cells.
        let mut t = 0usize;
        loop {
            if t == tree.len() {
                return Ok(());
            }
            tree[t] += 1;
            if tree[t] < cell_radix[t] {
                break;
            }
            tree[t] = 0;
            t += 1;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permutations(&mut items, n, &mut out);
    out.sort(); // deterministic order
    out
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

/// Result of an entropy minimization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyValue {
    /// The minimum Shannon entropy in bits over the enumerated family.
    pub bits: f64,
    /// The minimizing measurement (lexicographically first among ties).
    pub argmin: Measurement,
    /// Size of the deduplicated family that was searched.
    pub n_measurements: usize,
}

#[derive(Clone)]
struct CachedEntropy {
    bits: f64,
    plan: Vec<usize>,
    n_measurements: usize,
}

static CACHE: OnceLock<Mutex<HashMap<Vec<u8>, CachedEntropy>>> = OnceLock::new();
const CACHE_CAP: usize = 1 << 16;

fn cache() -> &'static Mutex<HashMap<Vec<u8>, CachedEntropy>> {
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cache_key(s: &StateTable, adaptive: bool) -> Vec<u8> {
    let mut key = s.canonical_bytes();
    key.push(adaptive as u8);
    key
}

/// Measurement entropy H(P): adaptive wirings for systems of
/// ≤ [`ADAPTIVE_PARTY_LIMIT`] parties, non-adaptive products otherwise.
pub fn measurement_entropy(s: &StateTable) -> Result<EntropyValue> {
    measurement_entropy_with_mode(s, s.n_parties() <= ADAPTIVE_PARTY_LIMIT)
}

/// Measurement entropy with the enumeration mode forced.
pub fn measurement_entropy_with_mode(s: &StateTable, adaptive: bool) -> Result<EntropyValue> {
    let key = cache_key(s, adaptive);
    if let Some(hit) = cache().lock().expect("entropy cache poisoned").get(&key).cloned() {
        return Ok(EntropyValue {
            bits: hit.bits,
            argmin: Measurement::from_plan(s.system().clone(), hit.plan),
            n_measurements: hit.n_measurements,
        });
    }

    let family = enumerate_fine_grained(s.system(), adaptive)?;
    let mut best: Option<(f64, &Measurement)> = None;
    for m in &family {
        let h = shannon_entropy(&m.outcome_distribution(s)?)?;
        match best {
            // Strict improvement only: the family is label-sorted, so ties
            // keep the lexicographically first measurement.
            Some((bits, _)) if h >= bits => {}
            _ => best = Some((h, m)),
        }
    }
    let (bits, argmin) = best.expect("enumeration is never empty");
    debug_assert!(bits <= (s.system().n_outcomes() as f64).log2() + 1e-9);

    let mut guard = cache().lock().expect("entropy cache poisoned");
    if guard.len() >= CACHE_CAP {
        guard.clear();
    }
    guard.insert(
        key,
        CachedEntropy {
            bits,
            plan: argmin.plan.clone(),
            n_measurements: family.len(),
        },
    );
    Ok(EntropyValue {
        bits,
        argmin: argmin.clone(),
        n_measurements: family.len(),
    })
}

/// Both entropies behind a conditional entropy, for witness reporting.
#[derive(Clone, Debug)]
pub struct CondEntropy {
    pub bits: f64,
    /// H(AB): entropy of the full table.
    pub joint: EntropyValue,
    /// H(B): entropy of the marginal on B.
    pub reduced: EntropyValue,
}

/// H(A|B) = H(AB) − H(B). `a` and `b` must be disjoint, sorted, and cover all
/// parties of `s` (marginalize first if they don't); either may be empty.
pub fn conditional_entropy_detailed(s: &StateTable, a: &[usize], b: &[usize]) -> Result<CondEntropy> {
    check_bipartition(s, a, b)?;
    let joint = measurement_entropy(s)?;
    let reduced = measurement_entropy(&s.marginal(b)?)?;
    Ok(CondEntropy {
        bits: joint.bits - reduced.bits,
        joint,
        reduced,
    })
}

/// H(A|B) in bits.
pub fn conditional_entropy(s: &StateTable, a: &[usize], b: &[usize]) -> Result<f64> {
    Ok(conditional_entropy_detailed(s, a, b)?.bits)
}

/// I(A:B) = H(A) + H(B) − H(AB). Same partition contract as
/// [`conditional_entropy`].
pub fn mutual_information(s: &StateTable, a: &[usize], b: &[usize]) -> Result<f64> {
    check_bipartition(s, a, b)?;
    let h_a = measurement_entropy(&s.marginal(a)?)?.bits;
    let h_b = measurement_entropy(&s.marginal(b)?)?.bits;
    let h_ab = measurement_entropy(s)?.bits;
    Ok(h_a + h_b - h_ab)
}

pub(crate) fn check_bipartition(s: &StateTable, a: &[usize], b: &[usize]) -> Result<()> {
    validate_subset(a, s.n_parties())?;
    validate_subset(b, s.n_parties())?;
    if a.iter().any(|t| b.contains(t)) {
        return Err(Error::PartySelection(format!(
            "subsets overlap: A={a:?}, B={b:?}"
        )));
    }
    if a.len() + b.len() != s.n_parties() {
        return Err(Error::PartySelection(format!(
            "A={a:?} and B={b:?} must cover all {} parties (marginalize first)",
            s.n_parties()
        )));
    }
    Ok(())
}

/// Party indices not in `sub`.
pub fn other_parties(s: &StateTable, sub: &[usize]) -> Vec<usize> {
    complement(sub, s.n_parties())
}

/// Test/diagnostic helper: the measurement family's completeness defect on a
/// state, `max_M |1 − Σ_I R_I·P|`.
pub fn completeness_defect(s: &StateTable, adaptive: bool) -> Result<f64> {
    let family = enumerate_fine_grained(s.system(), adaptive)?;
    let mut worst = 0.0f64;
    for m in &family {
        let total: f64 = m.outcome_distribution(s)?.iter().sum();
        worst = worst.max((total - 1.0).abs());
    }
    Ok(worst)
}
