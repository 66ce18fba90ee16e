//! Soundness of the inequality checkers: classical states never violate
//! DPI/SSA, every report's sides recompute from raw entropies, and every
//! violated witness replays to the same margin from its stored data alone.

mod common;

use common::{boxworld_samples, classical_samples, classical_system, rng};
use gpt_core::sampler::{random_stochastic_matrix, sample_classical_state};
use gpt_core::{
    check_dpi, check_lemma, check_ssa, check_subadditivity, conditional_entropy,
    measurement_entropy, search_counterexamples, shannon_entropy, InequalityKind, LemmaParams,
    SearchConfig, StateTable, Transformation, Verdict,
};
use rand::Rng;
use rayon::prelude::*;

/// Direct Shannon conditional entropy H(keep | given) on an all-classical
/// state, computed from the joint distribution with no measurement
/// machinery at all.
fn shannon_conditional(s: &StateTable, keep: &[usize], given: &[usize]) -> f64 {
    let radices: Vec<usize> = s
        .system()
        .parties
        .iter()
        .map(|p| p.outcomes)
        .collect();
    let joint = s.entries();
    let project = |mask: &[usize]| -> f64 {
        // Entropy of the marginal distribution on `mask`.
        let mut acc: std::collections::HashMap<Vec<usize>, f64> = std::collections::HashMap::new();
        for (idx, &p) in joint.iter().enumerate() {
            let mut digits = Vec::with_capacity(mask.len());
            let mut rest = idx;
            let mut all = vec![0usize; radices.len()];
            for (t, &r) in radices.iter().enumerate().rev() {
                all[t] = rest % r;
                rest /= r;
            }
            for &t in mask {
                digits.push(all[t]);
            }
            *acc.entry(digits).or_insert(0.0) += p;
        }
        let dist: Vec<f64> = acc.values().copied().collect();
        shannon_entropy(&dist).unwrap()
    };
    let mut both: Vec<usize> = keep.iter().chain(given).copied().collect();
    both.sort_unstable();
    project(&both) - project(given)
}

fn random_classical_transformation<R: Rng + ?Sized>(
    s: &StateTable,
    b: &[usize],
    rng: &mut R,
) -> Transformation {
    match rng.random_range(0..3u8) {
        0 => {
            let n = rng.random_range(1..=b.len());
            let mut parties = b.to_vec();
            for i in (1..parties.len()).rev() {
                parties.swap(i, rng.random_range(0..=i));
            }
            parties.truncate(n);
            parties.sort_unstable();
            Transformation::Discard { parties }
        }
        1 => {
            let party = b[rng.random_range(0..b.len())];
            let d_in = s.system().parties[party].outcomes;
            let d_out = rng.random_range(1..=d_in + 1);
            Transformation::ClassicalProcessing {
                party,
                matrix: random_stochastic_matrix(d_out, d_in, rng),
            }
        }
        _ => {
            let party = b[rng.random_range(0..b.len())];
            Transformation::CloneClassical { party }
        }
    }
}

#[test]
fn classical_dpi_and_ssa_never_violate_and_match_the_shannon_oracle() {
    let n_checks = 600u64;
    let failures: Vec<String> = (0..n_checks)
        .into_par_iter()
        .filter_map(|trial| {
            let mut rng = rng(9000 ^ trial);
            let system = classical_system(trial as usize);
            let s = sample_classical_state(&system, &mut rng).unwrap();
            let n = s.n_parties();
            let mask = rng.random_range(1..(1u32 << n) - 1) as usize;
            let a: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
            let b: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 0).collect();

            if trial % 2 == 0 {
                let t = random_classical_transformation(&s, &b, &mut rng);
                let report = check_dpi(&s, &a, &b, &t).unwrap();
                if report.verdict == Verdict::Violated {
                    return Some(format!(
                        "trial {trial}: classical DPI violated by {} ({t:?})",
                        report.margin
                    ));
                }
                let oracle = shannon_conditional(&s, &a, &b);
                if (report.lhs_bits - oracle).abs() > 1e-9 {
                    return Some(format!(
                        "trial {trial}: H(A|B) = {} but Shannon oracle says {oracle}",
                        report.lhs_bits
                    ));
                }
            } else {
                // Split B into C (kept) and D (discarded); D nonempty.
                let d_pick = rng.random_range(0..b.len());
                let d: Vec<usize> = vec![b[d_pick]];
                let c: Vec<usize> = b.iter().copied().filter(|p| *p != b[d_pick]).collect();
                let report = check_ssa(&s, &a, &c, &d).unwrap();
                if report.verdict == Verdict::Violated {
                    return Some(format!(
                        "trial {trial}: classical SSA violated by {}",
                        report.margin
                    ));
                }
                let mut cd: Vec<usize> = c.iter().chain(&d).copied().collect();
                cd.sort_unstable();
                let lhs_oracle = shannon_conditional(&s, &a, &cd);
                let rhs_oracle = shannon_conditional(&s, &a, &c);
                if (report.lhs_bits - lhs_oracle).abs() > 1e-9
                    || (report.rhs_bits - rhs_oracle).abs() > 1e-9
                {
                    return Some(format!(
                        "trial {trial}: SSA sides ({}, {}) vs oracle ({lhs_oracle}, {rhs_oracle})",
                        report.lhs_bits, report.rhs_bits
                    ));
                }
            }
            None
        })
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn report_sides_recompute_from_raw_measurement_entropies() {
    // Every conditional quantity in a report must equal H(joint) − H(reduced)
    // recomputed from scratch marginals of the witness state.
    for s in boxworld_samples(77, 12) {
        let report = check_dpi(
            &s,
            &[0],
            &[1],
            &Transformation::Discard { parties: vec![1] },
        )
        .unwrap();
        let h_ab = measurement_entropy(&s).unwrap().bits;
        let h_b = measurement_entropy(&s.marginal(&[1]).unwrap()).unwrap().bits;
        let h_a = measurement_entropy(&s.marginal(&[0]).unwrap()).unwrap().bits;
        assert!((report.lhs_bits - (h_ab - h_b)).abs() < 1e-12);
        // Discarding all of B conditions on the vacuum: H(A|vacuum) = H(A).
        assert!((report.rhs_bits - h_a).abs() < 1e-12);
        assert!(
            (report.margin - (report.lhs_bits - report.rhs_bits)).abs() < 1e-15,
            "margin must be lhs − rhs"
        );

        let sub = check_subadditivity(&s, &[0], &[1]).unwrap();
        assert!((sub.lhs_bits - h_ab).abs() < 1e-12);
        assert!((sub.rhs_bits - (h_a + h_b)).abs() < 1e-12);

        // Conditioning identity behind every lemma-1 term.
        let lemma1 = check_lemma(
            &s,
            1,
            &LemmaParams::Grouping {
                groups: vec![vec![0], vec![1]],
                gamma: vec![],
            },
        )
        .unwrap();
        assert!((lemma1.lhs_bits - h_ab).abs() < 1e-12);
        assert!((lemma1.rhs_bits - (h_a + h_b)).abs() < 1e-12);
    }
}

#[test]
fn conditioning_can_raise_entropy_only_beyond_the_classical_sector() {
    // H(A) ≥ H(A|B) is a theorem classically; in box-world the search is
    // expected to surface violations, which are findings, not errors.
    for s in classical_samples(123, 24) {
        let n = s.n_parties();
        let a = vec![0usize];
        let b: Vec<usize> = (1..n).collect();
        let h_a = measurement_entropy(&s.marginal(&a).unwrap()).unwrap().bits;
        let h_cond = conditional_entropy(&s, &a, &b).unwrap();
        assert!(
            h_cond <= h_a + 1e-9,
            "classical conditioning raised entropy: {h_cond} > {h_a}"
        );
    }
    let mut raised = 0usize;
    let mut worst: f64 = 0.0;
    for s in boxworld_samples(321, 24) {
        let h_a = measurement_entropy(&s.marginal(&[0]).unwrap()).unwrap().bits;
        let h_cond = conditional_entropy(&s, &[0], &[1]).unwrap();
        if h_cond > h_a + 1e-9 {
            raised += 1;
            worst = worst.max(h_cond - h_a);
        }
    }
    eprintln!(
        "finding: box-world conditioning raised entropy on {raised}/24 samples \
         (worst excess {worst:.6} bits)"
    );
}

#[test]
fn every_search_kind_returns_a_replayable_best_witness() {
    for kind in [
        InequalityKind::Dpi,
        InequalityKind::Ssa,
        InequalityKind::Lemma1,
        InequalityKind::Lemma3,
        InequalityKind::Subadditivity,
    ] {
        let outcome = search_counterexamples(&SearchConfig {
            kind,
            trials: 24,
            seed: 5,
            system: None,
        })
        .unwrap();
        let report = &outcome.best;
        assert_eq!(report.name, kind.name());
        let state = report.witness.state.as_ref().expect("witness state");
        let replayed = match kind {
            InequalityKind::Dpi => check_dpi(
                state,
                report.witness.a.as_ref().unwrap(),
                report.witness.b.as_ref().unwrap(),
                report.witness.transformation.as_ref().unwrap(),
            )
            .unwrap(),
            InequalityKind::Ssa => check_ssa(
                state,
                report.witness.a.as_ref().unwrap(),
                report.witness.c.as_ref().unwrap(),
                report.witness.d.as_ref().unwrap(),
            )
            .unwrap(),
            InequalityKind::Lemma1 => check_lemma(
                state,
                1,
                &LemmaParams::Grouping {
                    groups: report.witness.groups.clone().unwrap(),
                    gamma: report.witness.gamma.clone().unwrap(),
                },
            )
            .unwrap(),
            InequalityKind::Lemma3 => check_lemma(
                state,
                3,
                &LemmaParams::ClassicalConditional {
                    x: report.witness.a.clone().unwrap(),
                    y: report.witness.b.clone().unwrap(),
                },
            )
            .unwrap(),
            InequalityKind::Subadditivity => check_subadditivity(
                state,
                report.witness.a.as_ref().unwrap(),
                report.witness.b.as_ref().unwrap(),
            )
            .unwrap(),
        };
        assert!(
            (replayed.margin - report.margin).abs() < 1e-12,
            "{}: replay margin {} vs reported {}",
            kind.name(),
            replayed.margin,
            report.margin
        );
        assert_eq!(replayed.verdict, report.verdict, "{}", kind.name());
    }
}

#[test]
fn search_on_classical_states_is_clean_for_dpi_and_ssa() {
    for kind in [InequalityKind::Dpi, InequalityKind::Ssa] {
        let outcome = search_counterexamples(&SearchConfig {
            kind,
            trials: 256,
            seed: 17,
            system: Some(classical_system(2)),
        })
        .unwrap();
        assert_eq!(
            outcome.n_violations,
            0,
            "{}: classical sector produced violations (best margin {})",
            kind.name(),
            outcome.best.margin
        );
        assert!(outcome.best.margin <= 1e-9);
    }
}

#[test]
fn boxworld_search_surfaces_violations_for_dpi_and_ssa() {
    for kind in [InequalityKind::Dpi, InequalityKind::Ssa] {
        let outcome = search_counterexamples(&SearchConfig {
            kind,
            trials: 64,
            seed: 0,
            system: None,
        })
        .unwrap();
        assert!(
            outcome.n_violations >= 1,
            "{}: expected box-world violations",
            kind.name()
        );
        assert!(outcome.best.margin >= 1.0 - 1e-9);
        assert_eq!(outcome.n_trials, 64);
    }
}
