//! The `paper-examples` preset: every bundled closed-form landmark value,
//! recomputed in one run and compared at its stated tolerance.

use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use serde_json::json;

use gpt_core::icgame::ic_frontier;
use gpt_core::{
    analytic_i, build_named_state, check_ssa, chsh_value, classical_shared_randomness_box,
    conditional_entropy, max_classical_chsh, max_quantum_chsh, trace_theorem2_chain,
    transcript_from_box, NamedState, Verdict,
};

use crate::manifest::{envelope, RunManifest};
use crate::Cli;

#[derive(Serialize)]
struct Row {
    id: &'static str,
    claim: &'static str,
    expected: f64,
    actual: f64,
    tolerance: f64,
    pass: bool,
}

fn row(id: &'static str, claim: &'static str, expected: f64, actual: f64, tolerance: f64) -> Row {
    Row {
        id,
        claim,
        expected,
        actual,
        tolerance,
        pass: (actual - expected).abs() <= tolerance,
    }
}

fn bool_row(id: &'static str, claim: &'static str, observed: bool) -> Row {
    row(id, claim, 1.0, if observed { 1.0 } else { 0.0 }, 0.0)
}

fn collect_rows() -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let sqrt2 = std::f64::consts::SQRT_2;
    let e_quantum = std::f64::consts::FRAC_1_SQRT_2;

    // Conditioning can hide a classical bit behind a gbit record.
    let record = build_named_state(&NamedState::SsaExample)?;
    rows.push(row(
        "ssa_cond_full",
        "record state: H(x0 | x1, Z)",
        1.0,
        conditional_entropy(&record, &[0], &[1, 2])?,
        1e-9,
    ));
    let x0z = record.marginal(&[0, 2])?;
    rows.push(row(
        "ssa_cond_reduced",
        "record state after discarding x1: H(x0 | Z)",
        0.0,
        conditional_entropy(&x0z, &[0], &[1])?,
        1e-9,
    ));
    let ssa_report = check_ssa(&record, &[0], &[2], &[1])?;
    rows.push(row(
        "ssa_margin",
        "record state: SSA violation margin H(x0|x1,Z) - H(x0|Z)",
        1.0,
        ssa_report.margin,
        1e-9,
    ));
    rows.push(bool_row(
        "ssa_verdict",
        "record state: SSA verdict is 'violated'",
        ssa_report.verdict == Verdict::Violated,
    ));

    // CHSH landmarks.
    rows.push(row(
        "chsh_pr",
        "PR box: CHSH value S",
        4.0,
        chsh_value(&build_named_state(&NamedState::PrBox)?)?,
        1e-12,
    ));
    rows.push(row(
        "chsh_isotropic_quantum",
        "isotropic box at E = 1/sqrt2: S = 2 + sqrt2",
        2.0 + sqrt2,
        chsh_value(&build_named_state(&NamedState::IsotropicBox(e_quantum))?)?,
        1e-9,
    ));
    rows.push(row(
        "chsh_max_classical",
        "maximum S over deterministic classical strategies",
        3.0,
        max_classical_chsh()?.s,
        1e-12,
    ));
    rows.push(row(
        "chsh_max_quantum",
        "maximum S over singlet measurement angles",
        2.0 + sqrt2,
        max_quantum_chsh()?.s,
        1e-6,
    ));

    // Information-causality game landmarks.
    rows.push(row(
        "ic_perfect_box",
        "IC game with a perfect box (E = 1, k = 1): I = 2 > m = 1",
        2.0,
        analytic_i(1.0, 1)?,
        1e-9,
    ));
    rows.push(row(
        "ic_quantum_box",
        "IC game at quantum strength (E = 1/sqrt2, k = 1): I = 2(1 - h(cos^2(pi/8)))",
        0.798_247_926_614_287_7,
        analytic_i(e_quantum, 1)?,
        1e-6,
    ));
    let frontier = ic_frontier(0.60, 0.90, 0.01, 12)?;
    let iff_holds = frontier.iter().all(|cell| {
        let supra_observed = cell.first_violating_k.is_some() || cell.analytic_supra;
        let supra_expected = cell.e > e_quantum;
        supra_observed == supra_expected
    });
    rows.push(bool_row(
        "ic_iff_frontier",
        "sweep E in {0.60..0.90}: I/m > 1 occurs exactly where E > 1/sqrt2",
        iff_holds,
    ));
    let first_k_075 = frontier
        .iter()
        .find(|cell| (cell.e - 0.75).abs() < 1e-9)
        .and_then(|cell| cell.first_violating_k);
    rows.push(row(
        "ic_first_k_075",
        "supra-quantum box E = 0.75: smallest k with I/m > 1",
        3.0,
        first_k_075.map_or(f64::NAN, |k| k as f64),
        0.0,
    ));

    // The proof chain on the perfect-box transcript breaks exactly at the
    // grouping step; on the classical box every step goes through.
    let pr_trace = trace_theorem2_chain(
        &transcript_from_box(&build_named_state(&NamedState::PrBox)?)?,
        2,
        1,
    )?;
    rows.push(row(
        "chain_pr_lemma4_rhs",
        "perfect-box transcript: H(a | B, x)",
        1.0,
        pr_trace.steps[0].rhs_bits,
        1e-9,
    ));
    rows.push(bool_row(
        "chain_pr_lemma4_tight",
        "perfect-box transcript: the game step n - m <= H(a|B,x) is tight",
        pr_trace.steps[0].verdict == Verdict::Tight,
    ));
    rows.push(row(
        "chain_pr_lemma1_rhs",
        "perfect-box transcript: sum_i H(a_i | B, x)",
        0.0,
        pr_trace.steps[1].rhs_bits,
        1e-9,
    ));
    rows.push(row(
        "chain_pr_lemma1_margin",
        "perfect-box transcript: grouping step violated by",
        1.0,
        pr_trace.steps[1].margin,
        1e-9,
    ));
    rows.push(row(
        "chain_pr_i",
        "perfect-box transcript: I recovered from measurement entropies",
        2.0,
        pr_trace.i_bits,
        1e-9,
    ));
    rows.push(row(
        "chain_pr_first_failing",
        "perfect-box transcript: index of the first failing step (the grouping lemma)",
        1.0,
        pr_trace.first_failing.map_or(f64::NAN, |i| i as f64),
        0.0,
    ));
    let classical_trace =
        trace_theorem2_chain(&transcript_from_box(&classical_shared_randomness_box())?, 2, 1)?;
    rows.push(bool_row(
        "chain_classical_all_hold",
        "shared-randomness transcript: every chain step holds",
        classical_trace.all_hold(),
    ));
    rows.push(row(
        "chain_classical_i",
        "shared-randomness transcript: I",
        1.0,
        classical_trace.i_bits,
        1e-9,
    ));

    Ok(rows)
}

pub fn run(cli: &Cli, started: Instant) -> Result<ExitCode> {
    let rows = collect_rows()?;
    let n_failed = rows.iter().filter(|r| !r.pass).count();
    let all_pass = n_failed == 0;

    if cli.json {
        let doc = envelope(
            RunManifest::new(cli.seed, started.elapsed().as_millis()),
            json!({ "rows": rows, "all_pass": all_pass, "n_failed": n_failed }),
        );
        println!("{}", serde_json::to_string_pretty(&doc)?);
        if !all_pass {
            for r in rows.iter().filter(|r| !r.pass) {
                eprintln!(
                    "MISMATCH {}: expected {:.12}, got {:.12} (tol {:.0e})",
                    r.id, r.expected, r.actual, r.tolerance
                );
            }
        }
    } else {
        println!("paper-examples: {} checks", rows.len());
        for r in &rows {
            let mark = if r.pass { "ok  " } else { "FAIL" };
            println!(
                "  {mark}  {:<72} expected {:>16.12}  actual {:>16.12}",
                r.claim, r.expected, r.actual
            );
        }
        if all_pass {
            println!("all checks passed");
        } else {
            println!("{n_failed} check(s) FAILED — diff above");
        }
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
