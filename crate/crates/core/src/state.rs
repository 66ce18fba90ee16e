//! State tables: conditional outcome distributions P(i⃗ | j⃗) over a system.
//!
//! Storage is dense, settings-major then outcomes, both flattened row-major in
//! declared party order: `entries[J · n_outcomes + I] = P(i⃗|j⃗)`.
//!
//! Invariants enforced by [`StateTable::new`] (tolerance [`crate::TABLE_TOL`]):
//! - every entry in `[0, 1]`,
//! - `Σ_I P(I|J) = 1` for every joint setting `J`,
//! - no-signalling: for every party subset the marginal is independent of the
//!   remaining parties' settings.
//!
//! The JSON form is `{"parties":[{"k":…,"l":…},…], "table":[[…],…]}` with
//! `table[J][I]`; the vacuum serializes as one row `[1.0]`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::report::{CheckReport, Verdict, Witness};
use crate::system::{complement, unrank, validate_subset, PartyType, SystemType};
use crate::TABLE_TOL;

#[derive(Clone, PartialEq, Debug)]
pub struct StateTable {
    system: SystemType,
    /// `entries[J * n_outcomes + I]`.
    entries: Vec<f64>,
}

/// Structural health of a table, as measured (not asserted).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    /// How far the worst entry strays below 0 or above 1.
    pub max_bound_deviation: f64,
    /// Worst `|Σ_I P(I|J) − 1|` over settings J.
    pub max_normalization_deviation: f64,
    /// Worst marginal disagreement over (subset, complement-settings) pairs.
    pub no_signalling_deviation: f64,
    /// Subset achieving the worst no-signalling deviation, if any.
    pub worst_subset: Option<Vec<usize>>,
    /// The two complement setting vectors whose marginals disagree most.
    pub worst_settings: Option<(Vec<usize>, Vec<usize>)>,
    pub tolerance: f64,
    pub pass: bool,
}

impl ValidationReport {
    pub fn worst_deviation(&self) -> f64 {
        self.max_bound_deviation
            .max(self.max_normalization_deviation)
            .max(self.no_signalling_deviation)
    }
}

impl StateTable {
    /// Validating constructor: bounds, normalization, and no-signalling within
    /// [`TABLE_TOL`].
    pub fn new(system: SystemType, entries: Vec<f64>) -> Result<Self> {
        let s = Self::new_unchecked(system, entries)?;
        let report = s.validate();
        if !report.pass {
            if report.no_signalling_deviation > report.tolerance {
                let (sa, sb) = report.worst_settings.clone().unwrap_or_default();
                return Err(Error::NoSignalling {
                    deviation: report.no_signalling_deviation,
                    subset: report.worst_subset.clone().unwrap_or_default(),
                    settings_a: sa,
                    settings_b: sb,
                });
            }
            return Err(Error::InvalidTable {
                what: "entry bounds or normalization".into(),
                deviation: report.worst_deviation(),
            });
        }
        Ok(s)
    }

    /// Shape-checked but numerically unvalidated constructor. Needed to load
    /// untrusted tables for diagnosis and to build deliberately broken tables
    /// in tests; everything downstream assumes [`Self::validate`] passes.
    pub fn new_unchecked(system: SystemType, entries: Vec<f64>) -> Result<Self> {
        system.validate()?;
        let want = system.n_settings() * system.n_outcomes();
        if entries.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "table has {} entries, system needs {}",
                entries.len(),
                want
            )));
        }
        Ok(Self { system, entries })
    }

    /// The tensor unit: empty party list, single entry 1.
    pub fn vacuum() -> Self {
        Self {
            system: SystemType::vacuum(),
            entries: vec![1.0],
        }
    }

    pub fn system(&self) -> &SystemType {
        &self.system
    }

    pub fn n_parties(&self) -> usize {
        self.system.n_parties()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// P(I|J) by flat indices.
    pub fn entry(&self, j: usize, i: usize) -> f64 {
        self.entries[j * self.system.n_outcomes() + i]
    }

    /// P(i⃗|j⃗) by per-party vectors.
    pub fn prob(&self, settings: &[usize], outcomes: &[usize]) -> f64 {
        self.entry(
            self.system.setting_index(settings),
            self.system.outcome_index(outcomes),
        )
    }

    /// Measure all structural invariants with tolerance [`TABLE_TOL`].
    pub fn validate(&self) -> ValidationReport {
        self.validate_with_tol(TABLE_TOL)
    }

    pub fn validate_with_tol(&self, tolerance: f64) -> ValidationReport {
        let n_out = self.system.n_outcomes();
        let mut bound_dev = 0.0f64;
        for &e in &self.entries {
            if e < 0.0 {
                bound_dev = bound_dev.max(-e);
            }
            if e > 1.0 {
                bound_dev = bound_dev.max(e - 1.0);
            }
        }
        let mut norm_dev = 0.0f64;
        for j in 0..self.system.n_settings() {
            let sum: f64 = self.entries[j * n_out..(j + 1) * n_out].iter().sum();
            norm_dev = norm_dev.max((sum - 1.0).abs());
        }
        let (ns_dev, worst_subset, worst_settings) = self.no_signalling_deviation();
        let pass = bound_dev <= tolerance && norm_dev <= tolerance && ns_dev <= tolerance;
        ValidationReport {
            max_bound_deviation: bound_dev,
            max_normalization_deviation: norm_dev,
            no_signalling_deviation: ns_dev,
            worst_subset,
            worst_settings,
            tolerance,
            pass,
        }
    }

    /// Worst no-signalling deviation over every nonempty proper party subset:
    /// the marginal on the subset must not depend on the complement settings.
    #[allow(clippy::type_complexity)]
    fn no_signalling_deviation(&self) -> (f64, Option<Vec<usize>>, Option<(Vec<usize>, Vec<usize>)>) {
        let n = self.system.n_parties();
        let mut worst = 0.0f64;
        let mut worst_subset = None;
        let mut worst_settings = None;
        if n < 2 {
            return (0.0, None, None);
        }
        for mask in 1..((1usize << n) - 1) {
            let keep: Vec<usize> = (0..n).filter(|t| mask >> t & 1 == 1).collect();
            let comp = complement(&keep, n);
            let comp_settings: Vec<usize> = comp.iter().map(|&t| self.system.parties[t].settings).collect();
            let n_comp_settings: usize = comp_settings.iter().product();
            if n_comp_settings < 2 {
                continue;
            }
            let reference = self.marginal_fixing(&keep, &comp, &unrank(&comp_settings, 0));
            for jc in 1..n_comp_settings {
                let fixed = unrank(&comp_settings, jc);
                let table = self.marginal_fixing(&keep, &comp, &fixed);
                let dev = reference
                    .iter()
                    .zip(&table)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                if dev > worst {
                    worst = dev;
                    worst_subset = Some(keep.clone());
                    worst_settings = Some((unrank(&comp_settings, 0), fixed.clone()));
                }
            }
        }
        (worst, worst_subset, worst_settings)
    }

    /// Marginal entries over `keep`, with the complement parties held at the
    /// given fixed settings (complement outcomes summed out).
    fn marginal_fixing(&self, keep: &[usize], comp: &[usize], comp_fixed: &[usize]) -> Vec<f64> {
        let n = self.system.n_parties();
        let keep_set_radices: Vec<usize> = keep.iter().map(|&t| self.system.parties[t].settings).collect();
        let keep_out_radices: Vec<usize> = keep.iter().map(|&t| self.system.parties[t].outcomes).collect();
        let comp_out_radices: Vec<usize> = comp.iter().map(|&t| self.system.parties[t].outcomes).collect();
        let n_keep_settings: usize = keep_set_radices.iter().product();
        let n_keep_outcomes: usize = keep_out_radices.iter().product();
        let n_comp_outcomes: usize = comp_out_radices.iter().product();

        let mut full_settings = vec![0usize; n];
        for (idx, &t) in comp.iter().enumerate() {
            full_settings[t] = comp_fixed[idx];
        }
        let mut out = vec![0.0f64; n_keep_settings * n_keep_outcomes];
        let mut full_outcomes = vec![0usize; n];
        for jk in 0..n_keep_settings {
            let keep_settings = unrank(&keep_set_radices, jk);
            for (idx, &t) in keep.iter().enumerate() {
                full_settings[t] = keep_settings[idx];
            }
            let j_full = self.system.setting_index(&full_settings);
            for ik in 0..n_keep_outcomes {
                let keep_outcomes = unrank(&keep_out_radices, ik);
                for (idx, &t) in keep.iter().enumerate() {
                    full_outcomes[t] = keep_outcomes[idx];
                }
                let mut sum = 0.0;
                for ic in 0..n_comp_outcomes {
                    let comp_outcomes = unrank(&comp_out_radices, ic);
                    for (idx, &t) in comp.iter().enumerate() {
                        full_outcomes[t] = comp_outcomes[idx];
                    }
                    sum += self.entry(j_full, self.system.outcome_index(&full_outcomes));
                }
                out[jk * n_keep_outcomes + ik] = sum;
            }
        }
        out
    }

    /// No-signalling check as a report: passes iff every marginal is
    /// setting-independent within [`TABLE_TOL`]; the witness carries the worst
    /// (subset, settings) pair.
    pub fn check_no_signalling(&self) -> CheckReport {
        let (dev, subset, settings) = self.no_signalling_deviation();
        let verdict = if dev <= TABLE_TOL { Verdict::Holds } else { Verdict::Violated };
        let (sa, sb) = match settings {
            Some((a, b)) => (Some(a), Some(b)),
            None => (None, None),
        };
        CheckReport::with_verdict(
            "no_signalling",
            dev,
            0.0,
            verdict,
            TABLE_TOL,
            Witness {
                state: Some(self.clone()),
                subset,
                settings_a: sa,
                settings_b: sb,
                ..Witness::default()
            },
        )
    }

    /// Composite state: `self`'s parties followed by `other`'s,
    /// P_AB(i⃗i⃗′|j⃗j⃗′) = P_A(i⃗|j⃗)·P_B(i⃗′|j⃗′).
    pub fn tensor(&self, other: &Self) -> Self {
        let system = self.system.tensor(&other.system);
        let (la, lb) = (self.system.n_outcomes(), other.system.n_outcomes());
        let (ka, kb) = (self.system.n_settings(), other.system.n_settings());
        let mut entries = vec![0.0f64; (ka * kb) * (la * lb)];
        for ja in 0..ka {
            for jb in 0..kb {
                let j = ja * kb + jb;
                for ia in 0..la {
                    for ib in 0..lb {
                        entries[j * (la * lb) + ia * lb + ib] = self.entry(ja, ia) * other.entry(jb, ib);
                    }
                }
            }
        }
        Self { system, entries }
    }

    /// Marginal on `keep` (sorted subset; empty gives the vacuum). Discarded
    /// parties' settings are irrelevant by no-signalling; this is verified and
    /// a violation beyond [`TABLE_TOL`] is an error.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        let n = self.system.n_parties();
        validate_subset(keep, n)?;
        if keep.len() == n {
            return Ok(self.clone());
        }
        let comp = complement(keep, n);
        let comp_settings: Vec<usize> = comp.iter().map(|&t| self.system.parties[t].settings).collect();
        let n_comp_settings: usize = comp_settings.iter().product();
        let reference = self.marginal_fixing(keep, &comp, &unrank(&comp_settings, 0));
        for jc in 1..n_comp_settings {
            let fixed = unrank(&comp_settings, jc);
            let table = self.marginal_fixing(keep, &comp, &fixed);
            let dev = reference
                .iter()
                .zip(&table)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            if dev > TABLE_TOL {
                return Err(Error::NoSignalling {
                    deviation: dev,
                    subset: keep.to_vec(),
                    settings_a: unrank(&comp_settings, 0),
                    settings_b: fixed,
                });
            }
        }
        Ok(Self {
            system: self.system.subsystem(keep)?,
            entries: reference,
        })
    }

    /// Conditional state on the remaining parties after party `party` is
    /// measured with fiducial `setting` and yields `outcome`:
    /// P′(i⃗|j⃗) = P(i⃗, outcome | j⃗, setting) / P_party(outcome|setting).
    ///
    /// Errors if the conditioned outcome has probability ≤ [`TABLE_TOL`]
    /// (indistinguishable from zero at table tolerance).
    pub fn conditional_marginal(&self, party: usize, outcome: usize, setting: usize) -> Result<Self> {
        let n = self.system.n_parties();
        if party >= n {
            return Err(Error::PartySelection(format!(
                "party {party} out of range for {n} parties"
            )));
        }
        let pt = self.system.parties[party];
        if setting >= pt.settings || outcome >= pt.outcomes {
            return Err(Error::PartySelection(format!(
                "setting {setting} / outcome {outcome} out of range for party {party} ({} settings, {} outcomes)",
                pt.settings, pt.outcomes
            )));
        }
        let p_cond = self.marginal(&[party])?.entry(setting, outcome);
        if p_cond <= TABLE_TOL {
            return Err(Error::ZeroProbability {
                party,
                outcome,
                setting,
                probability: p_cond,
            });
        }
        let keep = complement(&[party], n);
        let rest_system = self.system.subsystem(&keep)?;
        let n_rest_settings = rest_system.n_settings();
        let n_rest_outcomes = rest_system.n_outcomes();
        let mut entries = vec![0.0f64; n_rest_settings * n_rest_outcomes];
        let mut full_settings = vec![0usize; n];
        let mut full_outcomes = vec![0usize; n];
        full_settings[party] = setting;
        full_outcomes[party] = outcome;
        for jr in 0..n_rest_settings {
            let rest_settings = rest_system.settings_of(jr);
            for (idx, &t) in keep.iter().enumerate() {
                full_settings[t] = rest_settings[idx];
            }
            let j_full = self.system.setting_index(&full_settings);
            for ir in 0..n_rest_outcomes {
                let rest_outcomes = rest_system.outcomes_of(ir);
                for (idx, &t) in keep.iter().enumerate() {
                    full_outcomes[t] = rest_outcomes[idx];
                }
                entries[jr * n_rest_outcomes + ir] =
                    self.entry(j_full, self.system.outcome_index(&full_outcomes)) / p_cond;
            }
        }
        let out = Self::new_unchecked(rest_system, entries)?;
        // Division by p_cond amplifies the input's float noise by 1/p_cond.
        let report = out.validate_with_tol(TABLE_TOL * (1.0 + 1.0 / p_cond));
        if !report.pass {
            return Err(Error::InvalidTable {
                what: "conditional marginal left table tolerance".into(),
                deviation: report.worst_deviation(),
            });
        }
        Ok(out)
    }

    /// Reorder parties: new party `t` is old party `perm[t]`
    /// (`perm` must be a permutation of `0..n`).
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let n = self.system.n_parties();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::PartySelection(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        let system = SystemType::new(perm.iter().map(|&p| self.system.parties[p]).collect());
        let set_radices = system.setting_radices();
        let out_radices = system.outcome_radices();
        let mut entries = vec![0.0f64; self.entries.len()];
        let n_out = system.n_outcomes();
        let mut old_settings = vec![0usize; n];
        let mut old_outcomes = vec![0usize; n];
        for j_new in 0..system.n_settings() {
            let new_settings = unrank(&set_radices, j_new);
            for (t, &p) in perm.iter().enumerate() {
                old_settings[p] = new_settings[t];
            }
            let j_old = self.system.setting_index(&old_settings);
            for i_new in 0..n_out {
                let new_outcomes = unrank(&out_radices, i_new);
                for (t, &p) in perm.iter().enumerate() {
                    old_outcomes[p] = new_outcomes[t];
                }
                entries[j_new * n_out + i_new] =
                    self.entry(j_old, self.system.outcome_index(&old_outcomes));
            }
        }
        Ok(Self { system, entries })
    }

    /// Convex combination of same-system tables; weights must be a
    /// distribution within [`TABLE_TOL`].
    pub fn convex_mix(components: &[(f64, &StateTable)]) -> Result<Self> {
        let Some(((_, first), rest)) = components.split_first() else {
            return Err(Error::InvalidParameter("convex_mix needs at least one component".into()));
        };
        let wsum: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| *w < -TABLE_TOL) || (wsum - 1.0).abs() > TABLE_TOL {
            return Err(Error::InvalidDistribution(format!(
                "mixture weights must be nonnegative and sum to 1 (sum = {wsum})"
            )));
        }
        for (_, s) in rest {
            if s.system != first.system {
                return Err(Error::DimensionMismatch(
                    "convex_mix components live on different systems".into(),
                ));
            }
        }
        let mut entries = vec![0.0f64; first.entries.len()];
        for (w, s) in components {
            for (e, &x) in entries.iter_mut().zip(&s.entries) {
                *e += w * x;
            }
        }
        Ok(Self {
            system: first.system.clone(),
            entries,
        })
    }

    /// Canonical byte string: party list plus entry bit patterns. Used as the
    /// entropy cache key; identical bytes ⇒ identical table.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::with_capacity(16 + 16 * self.system.n_parties() + 8 * self.entries.len());
        bytes.extend_from_slice(&(self.system.n_parties() as u64).to_le_bytes());
        for p in &self.system.parties {
            bytes.extend_from_slice(&(p.settings as u64).to_le_bytes());
            bytes.extend_from_slice(&(p.outcomes as u64).to_le_bytes());
        }
        for e in &self.entries {
            bytes.extend_from_slice(&e.to_le_bytes());
        }
        bytes
    }
}

impl Serialize for StateTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Dto<'a> {
            parties: &'a [PartyType],
            table: Vec<&'a [f64]>,
        }
        let n_out = self.system.n_outcomes();
        Dto {
            parties: &self.system.parties,
            table: self.entries.chunks(n_out).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Dto {
            parties: Vec<PartyType>,
            table: Vec<Vec<f64>>,
        }
        let dto = Dto::deserialize(deserializer)?;
        let system = SystemType::new(dto.parties);
        system.validate().map_err(D::Error::custom)?;
        let (ns, no) = (system.n_settings(), system.n_outcomes());
        if dto.table.len() != ns {
            return Err(D::Error::custom(format!(
                "table has {} rows, system needs {} joint settings",
                dto.table.len(),
                ns
            )));
        }
        let mut entries = Vec::with_capacity(ns * no);
        for (j, row) in dto.table.iter().enumerate() {
            if row.len() != no {
                return Err(D::Error::custom(format!(
                    "row {j} has {} entries, system needs {no} joint outcomes",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        StateTable::new_unchecked(system, entries).map_err(D::Error::custom)
    }
}

/// The named states used throughout tests, the CLI, and the game module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedState {
    /// Two gbits: p(ab|jj′) = 1/2 if a⊕b = j·j′, else 0.
    PrBox,
    /// Two gbits: p(ab|jj′) = (1±E)/4 with a⊕b = j·j′ favored; CHSH S = 2+2E.
    IsotropicBox(f64),
    /// Single-gbit extreme point `v ∈ 0..4`: outcome for setting 0 is `v>>1`,
    /// for setting 1 is `v&1`.
    GbitVertex(u8),
    /// Single classical register with the given outcome distribution.
    Classical(Vec<f64>),
    /// Two uniform classical bits x⁰, x¹ plus a gbit Z whose fiducial setting
    /// j returns x^j with certainty.
    SsaExample,
    /// Uniform noise on an arbitrary system: every entry 1/(Π_t l_t).
    UniformNoise(SystemType),
}

/// Build one of the named states.
pub fn build_named_state(which: &NamedState) -> Result<StateTable> {
    match which {
        NamedState::PrBox => build_named_state(&NamedState::IsotropicBox(1.0)),
        NamedState::IsotropicBox(e) => {
            if !(0.0..=1.0).contains(e) || !e.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "isotropic box correlation E must lie in [0,1], got {e}"
                )));
            }
            let system = SystemType::from_pairs(&[(2, 2), (2, 2)]);
            let mut entries = vec![0.0f64; 16];
            for j in 0..2usize {
                for jp in 0..2usize {
                    for a in 0..2usize {
                        for b in 0..2usize {
                            let favored = (a ^ b) == (j & jp);
                            let p = if favored { (1.0 + e) / 4.0 } else { (1.0 - e) / 4.0 };
                            entries[(j * 2 + jp) * 4 + (a * 2 + b)] = p;
                        }
                    }
                }
            }
            StateTable::new(system, entries)
        }
        NamedState::GbitVertex(v) => {
            if *v > 3 {
                return Err(Error::InvalidParameter(format!(
                    "gbit vertex index must lie in 0..4, got {v}"
                )));
            }
            deterministic_party_state(PartyType::gbit(), &[(*v >> 1) as usize, (*v & 1) as usize])
        }
        NamedState::Classical(dist) => {
            let sum: f64 = dist.iter().sum();
            if dist.is_empty() || dist.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (sum - 1.0).abs() > TABLE_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "classical state needs a probability vector, got {dist:?}"
                )));
            }
            StateTable::new(
                SystemType::new(vec![PartyType::classical(dist.len())]),
                dist.clone(),
            )
        }
        NamedState::SsaExample => {
            // Parties (x⁰, x¹, Z) = ((1,2), (1,2), (2,2));
            // P(x⁰,x¹,z | j) = 1/4 · [z = x^j].
            let system = SystemType::from_pairs(&[(1, 2), (1, 2), (2, 2)]);
            let mut entries = vec![0.0f64; 2 * 8];
            for j in 0..2usize {
                for x0 in 0..2usize {
                    for x1 in 0..2usize {
                        for z in 0..2usize {
                            let xj = if j == 0 { x0 } else { x1 };
                            if z == xj {
                                entries[j * 8 + (x0 * 4 + x1 * 2 + z)] = 0.25;
                            }
                        }
                    }
                }
            }
            StateTable::new(system, entries)
        }
        NamedState::UniformNoise(system) => {
            system.validate()?;
            let p = 1.0 / system.n_outcomes() as f64;
            StateTable::new(
                system.clone(),
                vec![p; system.n_settings() * system.n_outcomes()],
            )
        }
    }
}

/// Single-party deterministic state: P(i|j) = δ_{i, assignment[j]}.
pub fn deterministic_party_state(party: PartyType, assignment: &[usize]) -> Result<StateTable> {
    if assignment.len() != party.settings || assignment.iter().any(|&o| o >= party.outcomes) {
        return Err(Error::InvalidParameter(format!(
            "deterministic assignment {assignment:?} does not fit party {party:?}"
        )));
    }
    let mut entries = vec![0.0f64; party.settings * party.outcomes];
    for (j, &o) in assignment.iter().enumerate() {
        entries[j * party.outcomes + o] = 1.0;
    }
    StateTable::new(SystemType::new(vec![party]), entries)
}

/// Deterministic classical bit: P(i) = δ_{i,v}.
pub fn classical_bit(v: usize) -> StateTable {
    deterministic_party_state(PartyType::classical(2), &[v]).expect("bit value in range")
}

/// Product of single-party deterministic states, one assignment slice per party.
pub fn product_deterministic_state(system: &SystemType, assignments: &[Vec<usize>]) -> Result<StateTable> {
    if assignments.len() != system.n_parties() {
        return Err(Error::DimensionMismatch(
            "one assignment per party required".into(),
        ));
    }
    let mut out = StateTable::vacuum();
    for (p, a) in system.parties.iter().zip(assignments) {
        out = out.tensor(&deterministic_party_state(*p, a)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr_box() -> StateTable {
        build_named_state(&NamedState::PrBox).unwrap()
    }

    #[test]
    fn pr_box_layout_and_values() {
        let s = pr_box();
        // Settings-major rows; row J = j·2+j′, column I = a·2+b.
        assert_eq!(s.prob(&[0, 0], &[0, 0]), 0.5);
        assert_eq!(s.prob(&[0, 0], &[0, 1]), 0.0);
        assert_eq!(s.prob(&[1, 1], &[0, 1]), 0.5);
        assert_eq!(s.prob(&[1, 1], &[0, 0]), 0.0);
        assert!(s.validate().pass);
    }

    #[test]
    fn isotropic_interpolates() {
        let e = 0.5;
        let s = build_named_state(&NamedState::IsotropicBox(e)).unwrap();
        assert!((s.prob(&[0, 1], &[1, 1]) - (1.0 + e) / 4.0).abs() < 1e-15);
        assert!((s.prob(&[0, 1], &[1, 0]) - (1.0 - e) / 4.0).abs() < 1e-15);
        assert!(build_named_state(&NamedState::IsotropicBox(1.2)).is_err());
        assert!(build_named_state(&NamedState::IsotropicBox(-0.1)).is_err());
    }

    #[test]
    fn pr_marginals_are_uniform() {
        let s = pr_box();
        for party in [0usize, 1] {
            let m = s.marginal(&[party]).unwrap();
            for j in 0..2 {
                for i in 0..2 {
                    assert_eq!(m.entry(j, i), 0.5);
                }
            }
        }
    }

    #[test]
    fn conditioned_pr_is_deterministic() {
        // Condition on Bob setting 0 / outcome 0: Alice's gbit answers 0 for
        // both settings (j·0 = 0 forces a = b = 0).
        let s = pr_box();
        let c = s.conditional_marginal(1, 0, 0).unwrap();
        assert_eq!(c.n_parties(), 1);
        assert_eq!(c.entry(0, 0), 1.0);
        assert_eq!(c.entry(1, 0), 1.0);
    }

    #[test]
    fn conditioning_on_zero_probability_errors() {
        // Deterministic product: outcome 1 never occurs on either side.
        let v = build_named_state(&NamedState::GbitVertex(0)).unwrap();
        let s = v.tensor(&v);
        let err = s.conditional_marginal(1, 1, 0).unwrap_err();
        assert!(matches!(err, Error::ZeroProbability { party: 1, outcome: 1, .. }));
    }

    #[test]
    fn ssa_example_structure() {
        let s = build_named_state(&NamedState::SsaExample).unwrap();
        assert!(s.validate().pass);
        // Marginal on (x¹, Z): setting 1 correlates perfectly, setting 0 is uniform.
        let m = s.marginal(&[1, 2]).unwrap();
        assert_eq!(m.prob(&[0, 1], &[0, 0]), 0.5);
        assert_eq!(m.prob(&[0, 1], &[0, 1]), 0.0);
        assert_eq!(m.prob(&[0, 0], &[0, 0]), 0.25);
        assert_eq!(m.prob(&[0, 0], &[1, 0]), 0.25);
    }

    #[test]
    fn signalling_table_rejected_and_reported() {
        // Bob's outcome equals Alice's setting: maximally signalling.
        let system = SystemType::from_pairs(&[(2, 2), (2, 2)]);
        let mut entries = vec![0.0f64; 16];
        for j in 0..2usize {
            for jp in 0..2usize {
                for a in 0..2usize {
                    entries[(j * 2 + jp) * 4 + (a * 2 + j)] = 0.5;
                }
            }
        }
        assert!(matches!(
            StateTable::new(system.clone(), entries.clone()),
            Err(Error::NoSignalling { .. })
        ));
        let s = StateTable::new_unchecked(system, entries).unwrap();
        let report = s.check_no_signalling();
        assert_eq!(report.verdict, Verdict::Violated);
        assert!(report.lhs_bits >= 0.5);
        assert!(report.witness.subset.is_some());
        assert!(s.marginal(&[1]).is_err());
    }

    #[test]
    fn tensor_then_marginal_roundtrip() {
        let a = build_named_state(&NamedState::Classical(vec![0.25, 0.75])).unwrap();
        let b = pr_box();
        let ab = a.tensor(&b);
        assert_eq!(ab.n_parties(), 3);
        let back_a = ab.marginal(&[0]).unwrap();
        let back_b = ab.marginal(&[1, 2]).unwrap();
        for (x, y) in back_a.entries().iter().zip(a.entries()) {
            assert!((x - y).abs() < 1e-15);
        }
        for (x, y) in back_b.entries().iter().zip(b.entries()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn vacuum_is_tensor_unit() {
        let s = pr_box();
        let v = StateTable::vacuum();
        assert_eq!(v.tensor(&s), s);
        assert_eq!(s.tensor(&v), s);
        assert_eq!(s.marginal(&[]).unwrap(), v);
    }

    #[test]
    fn recombining_conditionals_reproduces_marginal() {
        // Σ_k P_B(k|l)·P_{A|B:k,l} = P_A, at table tolerance.
        let s = build_named_state(&NamedState::IsotropicBox(0.8)).unwrap();
        let pb = s.marginal(&[1]).unwrap();
        for l in 0..2usize {
            let mut mix = [0.0f64; 4];
            for k in 0..2usize {
                let cond = s.conditional_marginal(1, k, l).unwrap();
                for (i, e) in cond.entries().iter().enumerate() {
                    mix[i] += pb.entry(l, k) * e;
                }
            }
            let pa = s.marginal(&[0]).unwrap();
            for (x, y) in mix.iter().zip(pa.entries()) {
                assert!((x - y).abs() <= TABLE_TOL);
            }
        }
    }

    #[test]
    fn permute_parties_is_covariant() {
        let a = build_named_state(&NamedState::Classical(vec![0.1, 0.9])).unwrap();
        let b = build_named_state(&NamedState::GbitVertex(2)).unwrap();
        let ab = a.tensor(&b);
        let ba = ab.permute_parties(&[1, 0]).unwrap();
        assert_eq!(ba, b.tensor(&a));
        assert!(ab.permute_parties(&[0, 0]).is_err());
    }

    #[test]
    fn json_roundtrip_matches_layout() {
        let s = pr_box();
        let json = serde_json::to_string(&s).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["parties"][0]["k"], 2);
        assert_eq!(v["parties"][0]["l"], 2);
        // Row J=3 (j=1, j′=1) favors a≠b.
        assert_eq!(v["table"][3][0], 0.0);
        assert_eq!(v["table"][3][1], 0.5);
        let back: StateTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        // Shape errors are caught at parse time.
        let bad = r#"{"parties":[{"k":2,"l":2}],"table":[[0.5,0.5]]}"#;
        assert!(serde_json::from_str::<StateTable>(bad).is_err());
    }

    #[test]
    fn convex_mix_validates_weights() {
        let a = pr_box();
        let b = build_named_state(&NamedState::UniformNoise(a.system().clone())).unwrap();
        let m = StateTable::convex_mix(&[(0.5, &a), (0.5, &b)]).unwrap();
        assert!((m.prob(&[0, 0], &[0, 0]) - (0.25 + 0.125)).abs() < 1e-15);
        assert!(StateTable::convex_mix(&[(0.7, &a), (0.7, &b)]).is_err());
        let c = build_named_state(&NamedState::Classical(vec![1.0])).unwrap();
        assert!(StateTable::convex_mix(&[(0.5, &a), (0.5, &c)]).is_err());
    }
}
