//! Allowed local transformations of state tables.
//!
//! The transformation set is the operational one: discarding parties,
//! adjoining independent systems, post-processing a classical register with a
//! stochastic map, measure-and-prepare wirings (measure a party with a fixed
//! fiducial setting and keep a classical record of the outcome), and cloning
//! a classical register. All of them map valid tables to valid tables; data
//! processing is checked *against* these maps, never assumed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateTable;
use crate::system::{complement, validate_subset, PartyType, SystemType};
use crate::TABLE_TOL;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Transformation {
    /// Remove the listed parties (marginalize them out). Removing every party
    /// leaves the vacuum.
    Discard { parties: Vec<usize> },
    /// Adjoin an independent system in the given state (appended at the end).
    AddIndependent { state: StateTable },
    /// Post-process classical party `party` with the column-stochastic map
    /// `matrix[out][in]`; the party's outcome count becomes `matrix.len()`.
    ClassicalProcessing { party: usize, matrix: Vec<Vec<f64>> },
    /// Measure `party` with fiducial `setting` and keep a classical record of
    /// the outcome in place: party type (k,l) becomes (1,l).
    Wiring { party: usize, setting: usize },
    /// Copy classical party `party` into a fresh classical register of equal
    /// outcome count, appended at the end.
    CloneClassical { party: usize },
}

impl Transformation {
    /// Existing parties the transformation acts on.
    pub fn targets(&self) -> Vec<usize> {
        match self {
            Transformation::Discard { parties } => parties.clone(),
            Transformation::AddIndependent { .. } => Vec::new(),
            Transformation::ClassicalProcessing { party, .. }
            | Transformation::Wiring { party, .. }
            | Transformation::CloneClassical { party } => vec![*party],
        }
    }

    /// Where each old party index ends up after the transformation
    /// (`None` = removed), plus the party count afterwards.
    pub fn party_map(&self, n_before: usize) -> (Vec<Option<usize>>, usize) {
        match self {
            Transformation::Discard { parties } => {
                let mut map = Vec::with_capacity(n_before);
                let mut next = 0usize;
                for t in 0..n_before {
                    if parties.contains(&t) {
                        map.push(None);
                    } else {
                        map.push(Some(next));
                        next += 1;
                    }
                }
                (map, next)
            }
            Transformation::AddIndependent { state } => (
                (0..n_before).map(Some).collect(),
                n_before + state.n_parties(),
            ),
            Transformation::CloneClassical { .. } => ((0..n_before).map(Some).collect(), n_before + 1),
            Transformation::ClassicalProcessing { .. } | Transformation::Wiring { .. } => {
                ((0..n_before).map(Some).collect(), n_before)
            }
        }
    }

    /// Compact human-readable form for report tables.
    pub fn describe(&self) -> String {
        match self {
            Transformation::Discard { parties } => format!("discard{parties:?}"),
            Transformation::AddIndependent { state } => {
                format!("add_independent({} parties)", state.n_parties())
            }
            Transformation::ClassicalProcessing { party, matrix } => {
                format!("classical_processing(party {party}, {}→{})", matrix.first().map_or(0, Vec::len), matrix.len())
            }
            Transformation::Wiring { party, setting } => format!("wiring(party {party} @ setting {setting})"),
            Transformation::CloneClassical { party } => format!("clone_classical(party {party})"),
        }
    }

    /// Apply to a state table, producing the transformed table.
    pub fn apply(&self, s: &StateTable) -> Result<StateTable> {
        match self {
            Transformation::Discard { parties } => {
                let mut sorted = parties.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != parties.len() {
                    return Err(Error::PartySelection(format!(
                        "discard list {parties:?} contains duplicates"
                    )));
                }
                validate_subset(&sorted, s.n_parties())?;
                s.marginal(&complement(&sorted, s.n_parties()))
            }
            Transformation::AddIndependent { state } => Ok(s.tensor(state)),
            Transformation::ClassicalProcessing { party, matrix } => {
                classical_processing(s, *party, matrix)
            }
            Transformation::Wiring { party, setting } => wiring(s, *party, *setting),
            Transformation::CloneClassical { party } => clone_classical(s, *party),
        }
    }
}

/// Free-function form of [`Transformation::apply`].
pub fn apply_local_transformation(s: &StateTable, t: &Transformation) -> Result<StateTable> {
    t.apply(s)
}

fn check_party(s: &StateTable, party: usize) -> Result<PartyType> {
    let n = s.n_parties();
    if party >= n {
        return Err(Error::PartySelection(format!(
            "party {party} out of range for {n} parties"
        )));
    }
    Ok(s.system().parties[party])
}

/// Stochastic post-processing of a classical register:
/// P′(… i′ …|j⃗) = Σ_i matrix[i′][i] · P(… i …|j⃗).
fn classical_processing(s: &StateTable, party: usize, matrix: &[Vec<f64>]) -> Result<StateTable> {
    let pt = check_party(s, party)?;
    if !pt.is_classical() {
        return Err(Error::NotClassical { party, settings: pt.settings });
    }
    let d_in = pt.outcomes;
    let d_out = matrix.len();
    if d_out == 0 || matrix.iter().any(|row| row.len() != d_in) {
        return Err(Error::InvalidStochasticMatrix(format!(
            "matrix must be d_out×{d_in} with d_out ≥ 1"
        )));
    }
    for row in matrix {
        if row.iter().any(|&q| q < -TABLE_TOL) {
            return Err(Error::InvalidStochasticMatrix("negative entry".into()));
        }
    }
    for i in 0..d_in {
        let col: f64 = matrix.iter().map(|row| row[i]).sum();
        if (col - 1.0).abs() > TABLE_TOL {
            return Err(Error::InvalidStochasticMatrix(format!(
                "column {i} sums to {col}, must be 1"
            )));
        }
    }

    let mut parties = s.system().parties.clone();
    parties[party] = PartyType::classical(d_out);
    let system = SystemType::new(parties);
    let n_out_new = system.n_outcomes();
    let mut entries = vec![0.0f64; system.n_settings() * n_out_new];
    for j in 0..system.n_settings() {
        // Setting radices are unchanged (classical parties have one setting).
        for i_new in 0..n_out_new {
            let mut outs = system.outcomes_of(i_new);
            let i_prime = outs[party];
            let mut sum = 0.0;
            for (i_old, &w) in matrix[i_prime].iter().enumerate() {
                outs[party] = i_old;
                sum += w * s.entry(j, s.system().outcome_index(&outs));
            }
            entries[j * n_out_new + i_new] = sum;
        }
    }
    StateTable::new(system, entries)
}

/// Measure-and-prepare wiring: fix `party`'s fiducial setting and keep its
/// outcome as a classical record in place.
fn wiring(s: &StateTable, party: usize, setting: usize) -> Result<StateTable> {
    let pt = check_party(s, party)?;
    if setting >= pt.settings {
        return Err(Error::PartySelection(format!(
            "setting {setting} out of range for party {party} ({} settings)",
            pt.settings
        )));
    }
    let mut parties = s.system().parties.clone();
    parties[party] = PartyType::classical(pt.outcomes);
    let system = SystemType::new(parties);
    let n_out = system.n_outcomes();
    let mut entries = vec![0.0f64; system.n_settings() * n_out];
    for j_new in 0..system.n_settings() {
        let mut sets = system.settings_of(j_new);
        sets[party] = setting;
        let j_old = s.system().setting_index(&sets);
        // Outcome spaces coincide (the record keeps the outcome count).
        for i in 0..n_out {
            entries[j_new * n_out + i] = s.entry(j_old, i);
        }
    }
    StateTable::new(system, entries)
}

/// Clone a classical register into a fresh one appended at the end:
/// P′(i⃗, c|j⃗) = P(i⃗|j⃗) · [c = i_party]. Conceptually the fresh register is
/// adjoined in a fixed pure state and the copy map is applied to the pair.
pub fn clone_classical(s: &StateTable, party: usize) -> Result<StateTable> {
    let pt = check_party(s, party)?;
    if !pt.is_classical() {
        return Err(Error::NotClassical { party, settings: pt.settings });
    }
    let d = pt.outcomes;
    let mut parties = s.system().parties.clone();
    parties.push(PartyType::classical(d));
    let system = SystemType::new(parties);
    let n_out_old = s.system().n_outcomes();
    let mut entries = vec![0.0f64; system.n_settings() * n_out_old * d];
    for j in 0..system.n_settings() {
        for i_old in 0..n_out_old {
            let outs = s.system().outcomes_of(i_old);
            let c = outs[party];
            entries[j * (n_out_old * d) + i_old * d + c] = s.entry(j, i_old);
        }
    }
    StateTable::new(system, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{build_named_state, classical_bit, NamedState};

    #[test]
    fn clone_uniform_bit_is_perfectly_correlated() {
        let s = build_named_state(&NamedState::Classical(vec![0.5, 0.5])).unwrap();
        let c = clone_classical(&s, 0).unwrap();
        assert_eq!(c.n_parties(), 2);
        assert_eq!(c.prob(&[0, 0], &[0, 0]), 0.5);
        assert_eq!(c.prob(&[0, 0], &[1, 1]), 0.5);
        assert_eq!(c.prob(&[0, 0], &[0, 1]), 0.0);
        // Swap-symmetric and marginal-preserving.
        assert_eq!(c.permute_parties(&[1, 0]).unwrap(), c);
        assert_eq!(c.marginal(&[0]).unwrap(), s);
    }

    #[test]
    fn clone_rejects_gbit() {
        let s = build_named_state(&NamedState::PrBox).unwrap();
        assert!(matches!(
            clone_classical(&s, 0),
            Err(Error::NotClassical { party: 0, settings: 2 })
        ));
    }

    #[test]
    fn wiring_ssa_example_records_x0() {
        // Measuring Z with setting 0 turns it into a classical record equal to x⁰.
        let s = build_named_state(&NamedState::SsaExample).unwrap();
        let t = Transformation::Wiring { party: 2, setting: 0 };
        let w = t.apply(&s).unwrap();
        assert!(w.system().is_all_classical());
        assert_eq!(w.n_parties(), 3);
        for x0 in 0..2usize {
            for x1 in 0..2usize {
                assert_eq!(w.prob(&[0, 0, 0], &[x0, x1, x0]), 0.25);
                assert_eq!(w.prob(&[0, 0, 0], &[x0, x1, 1 - x0]), 0.0);
            }
        }
    }

    #[test]
    fn discard_and_vacuum() {
        let s = build_named_state(&NamedState::PrBox).unwrap();
        let t = Transformation::Discard { parties: vec![0, 1] };
        let v = t.apply(&s).unwrap();
        assert_eq!(v, StateTable::vacuum());
        let one = Transformation::Discard { parties: vec![1] }.apply(&s).unwrap();
        assert_eq!(one.n_parties(), 1);
        assert!(Transformation::Discard { parties: vec![2] }.apply(&s).is_err());
        assert!(Transformation::Discard { parties: vec![0, 0] }.apply(&s).is_err());
    }

    #[test]
    fn classical_processing_applies_column_stochastic_map() {
        let s = build_named_state(&NamedState::Classical(vec![0.25, 0.75])).unwrap();
        // Deterministic flip.
        let flip = Transformation::ClassicalProcessing {
            party: 0,
            matrix: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        };
        let f = flip.apply(&s).unwrap();
        assert!((f.entry(0, 0) - 0.75).abs() < 1e-15);
        // Merge to a single symbol (valid column-stochastic 1×2 map).
        let merge = Transformation::ClassicalProcessing {
            party: 0,
            matrix: vec![vec![1.0, 1.0]],
        };
        let m = merge.apply(&s).unwrap();
        assert_eq!(m.system().parties[0].outcomes, 1);
        assert!((m.entry(0, 0) - 1.0).abs() < 1e-15);
        // Column sums must be 1.
        let bad = Transformation::ClassicalProcessing {
            party: 0,
            matrix: vec![vec![0.5, 1.0], vec![0.4, 0.0]],
        };
        assert!(bad.apply(&s).is_err());
        // Gbits cannot be post-processed classically.
        let g = build_named_state(&NamedState::GbitVertex(0)).unwrap();
        let t = Transformation::ClassicalProcessing {
            party: 0,
            matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        assert!(t.apply(&g).is_err());
    }

    #[test]
    fn processing_acts_only_on_target_party() {
        let s = classical_bit(0).tensor(&build_named_state(&NamedState::Classical(vec![0.5, 0.5])).unwrap());
        let flip = Transformation::ClassicalProcessing {
            party: 1,
            matrix: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        };
        let f = flip.apply(&s).unwrap();
        assert_eq!(f.marginal(&[0]).unwrap(), classical_bit(0));
        assert!((f.prob(&[0, 0], &[0, 1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn party_map_tracks_indices() {
        let t = Transformation::Discard { parties: vec![1] };
        let (map, n_after) = t.party_map(3);
        assert_eq!(map, vec![Some(0), None, Some(1)]);
        assert_eq!(n_after, 2);
        let t = Transformation::CloneClassical { party: 0 };
        let (map, n_after) = t.party_map(2);
        assert_eq!(map, vec![Some(0), Some(1)]);
        assert_eq!(n_after, 3);
    }

    #[test]
    fn outputs_stay_valid_tables() {
        let s = build_named_state(&NamedState::SsaExample).unwrap();
        for t in [
            Transformation::Discard { parties: vec![0] },
            Transformation::Wiring { party: 2, setting: 1 },
            Transformation::CloneClassical { party: 1 },
            Transformation::AddIndependent { state: classical_bit(1) },
            Transformation::ClassicalProcessing {
                party: 0,
                matrix: vec![vec![0.9, 0.2], vec![0.1, 0.8]],
            },
        ] {
            let out = t.apply(&s).unwrap();
            assert!(out.validate().pass, "{} broke the table", t.describe());
        }
    }
}
