//! System types and mixed-radix index arithmetic.
//!
//! A *party* is described by its number of fiducial measurement settings `k`
//! and outcomes per setting `l`. A *system* is an ordered list of parties; the
//! empty list is the vacuum (tensor unit). Joint settings j⃗ and outcomes i⃗
//! are flattened row-major in declared party order:
//!
//! ```text
//! J = Σ_t j_t · Π_{u>t} k_u        I = Σ_t i_t · Π_{u>t} l_u
//! ```
//!
//! A classical party is one with `k = 1` (a single fiducial readout).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One party: `k` fiducial settings, `l` outcomes per setting.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PartyType {
    /// Number of fiducial measurement settings.
    #[serde(rename = "k")]
    pub settings: usize,
    /// Number of outcomes per setting.
    #[serde(rename = "l")]
    pub outcomes: usize,
}

impl PartyType {
    pub const fn new(settings: usize, outcomes: usize) -> Self {
        Self { settings, outcomes }
    }

    /// A classical register with `d` values: one setting, `d` outcomes.
    pub const fn classical(d: usize) -> Self {
        Self::new(1, d)
    }

    /// The generalized bit: two settings, two outcomes.
    pub const fn gbit() -> Self {
        Self::new(2, 2)
    }

    pub const fn is_classical(&self) -> bool {
        self.settings == 1
    }
}

/// Ordered list of parties. Empty = vacuum.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SystemType {
    pub parties: Vec<PartyType>,
}

impl SystemType {
    pub fn new(parties: Vec<PartyType>) -> Self {
        Self { parties }
    }

    /// The vacuum system: no parties, one (empty) setting and outcome.
    pub fn vacuum() -> Self {
        Self { parties: Vec::new() }
    }

    /// Shorthand constructor from `(k, l)` pairs.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Self {
        Self {
            parties: pairs.iter().map(|&(k, l)| PartyType::new(k, l)).collect(),
        }
    }

    pub fn n_parties(&self) -> usize {
        self.parties.len()
    }

    /// Joint setting count `Π_t k_t` (1 for the vacuum).
    pub fn n_settings(&self) -> usize {
        self.parties.iter().map(|p| p.settings).product()
    }

    /// Joint outcome count `Π_t l_t` (1 for the vacuum).
    pub fn n_outcomes(&self) -> usize {
        self.parties.iter().map(|p| p.outcomes).product()
    }

    pub fn is_all_classical(&self) -> bool {
        self.parties.iter().all(|p| p.is_classical())
    }

    /// All parties must have `k ≥ 1` and `l ≥ 1`.
    pub fn validate(&self) -> Result<()> {
        for (t, p) in self.parties.iter().enumerate() {
            if p.settings == 0 || p.outcomes == 0 {
                return Err(Error::InvalidSystem(format!(
                    "party {t} has k={} settings, l={} outcomes; both must be >= 1",
                    p.settings, p.outcomes
                )));
            }
        }
        Ok(())
    }

    fn radices(&self, f: impl Fn(&PartyType) -> usize) -> Vec<usize> {
        self.parties.iter().map(f).collect()
    }

    pub fn setting_radices(&self) -> Vec<usize> {
        self.radices(|p| p.settings)
    }

    pub fn outcome_radices(&self) -> Vec<usize> {
        self.radices(|p| p.outcomes)
    }

    /// Flatten a per-party setting vector to the joint index `J`.
    pub fn setting_index(&self, settings: &[usize]) -> usize {
        rank(&self.setting_radices(), settings)
    }

    /// Flatten a per-party outcome vector to the joint index `I`.
    pub fn outcome_index(&self, outcomes: &[usize]) -> usize {
        rank(&self.outcome_radices(), outcomes)
    }

    /// Per-party settings for the joint index `J`.
    pub fn settings_of(&self, j: usize) -> Vec<usize> {
        unrank(&self.setting_radices(), j)
    }

    /// Per-party outcomes for the joint index `I`.
    pub fn outcomes_of(&self, i: usize) -> Vec<usize> {
        unrank(&self.outcome_radices(), i)
    }

    /// Sub-system formed by `keep` (must be sorted, unique, in range).
    pub fn subsystem(&self, keep: &[usize]) -> Result<Self> {
        validate_subset(keep, self.n_parties())?;
        Ok(Self {
            parties: keep.iter().map(|&t| self.parties[t]).collect(),
        })
    }

    /// Composite of `self` followed by `other` (declared order concatenation).
    pub fn tensor(&self, other: &Self) -> Self {
        let mut parties = self.parties.clone();
        parties.extend_from_slice(&other.parties);
        Self { parties }
    }
}

/// Row-major rank of a digit vector with the given radices.
///
/// Panics on length mismatch or out-of-range digits; index arithmetic is an
/// internal invariant, not an input-validation surface.
pub(crate) fn rank(radices: &[usize], digits: &[usize]) -> usize {
    assert_eq!(radices.len(), digits.len(), "digit/radix length mismatch");
    let mut idx = 0usize;
    for (&r, &d) in radices.iter().zip(digits) {
        debug_assert!(d < r, "digit {d} out of range for radix {r}");
        idx = idx * r + d;
    }
    idx
}

/// Inverse of [`rank`].
pub(crate) fn unrank(radices: &[usize], mut idx: usize) -> Vec<usize> {
    let mut digits = vec![0usize; radices.len()];
    for t in (0..radices.len()).rev() {
        digits[t] = idx % radices[t];
        idx /= radices[t];
    }
    debug_assert_eq!(idx, 0, "index out of range for radices");
    digits
}

/// Checks that `subset` is sorted strictly ascending and within `0..n`.
pub(crate) fn validate_subset(subset: &[usize], n: usize) -> Result<()> {
    for w in subset.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::PartySelection(format!(
                "party list {subset:?} must be sorted strictly ascending"
            )));
        }
    }
    if let Some(&last) = subset.last() {
        if last >= n {
            return Err(Error::PartySelection(format!(
                "party index {last} out of range for {n} parties"
            )));
        }
    }
    Ok(())
}

/// Sorted complement of `subset` within `0..n` (assumes `subset` valid).
pub(crate) fn complement(subset: &[usize], n: usize) -> Vec<usize> {
    let mut in_subset = vec![false; n];
    for &t in subset {
        in_subset[t] = true;
    }
    (0..n).filter(|&t| !in_subset[t]).collect()
}
