//! Subcommand implementations.

use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use gpt_core::icgame::{ic_threshold_sweep, GameConfig, GameMode};
use gpt_core::inequalities::{
    check_dpi, check_lemma, check_ssa, check_subadditivity, search_counterexamples,
    trace_theorem2_chain, InequalityKind, LemmaParams, ProofChainTrace, SearchConfig,
};
use gpt_core::{
    chsh_value, conditional_entropy, max_classical_chsh, max_quantum_chsh, measurement_entropy,
    measurement_entropy_with_mode, transcript_from_box, tsirelson_check, CheckReport, IcTranscript,
    StateTable, SystemType, Transformation,
};

use crate::manifest::{envelope, RunManifest};
use crate::states::{parse_groups, parse_parties, parse_state};
use crate::{Cli, Command};

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let started = Instant::now();
    let output = match &cli.command {
        Command::Entropy(args) => entropy(args)?,
        Command::Conditional(args) => conditional(args)?,
        Command::Chsh(args) => chsh(args)?,
        Command::Check(args) => check(args)?,
        Command::Search(args) => search(args, cli.seed)?,
        Command::Icgame(args) => icgame(args, cli.seed)?,
        Command::PaperExamples => return crate::examples::run(cli, started),
        Command::State(args) => state(args)?,
    };
    let wall_ms = started.elapsed().as_millis();
    if cli.json {
        let doc = envelope(RunManifest::new(cli.seed, wall_ms), output.json);
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{}", output.human);
    }
    Ok(ExitCode::SUCCESS)
}

pub struct Output {
    pub json: Value,
    pub human: String,
}

fn format_report(report: &CheckReport) -> String {
    format!(
        "{}: lhs = {:.9}, rhs = {:.9}, margin = {:+.9} -> {} (tol {:.0e})",
        report.name, report.lhs_bits, report.rhs_bits, report.margin, report.verdict,
        report.tolerance
    )
}

fn entropy(args: &crate::EntropyArgs) -> Result<Output> {
    let s = parse_state(&args.state)?;
    let value = match args.mode.as_str() {
        "auto" => measurement_entropy(&s)?,
        "adaptive" => measurement_entropy_with_mode(&s, true)?,
        "non-adaptive" => measurement_entropy_with_mode(&s, false)?,
        other => bail!("unknown mode {other:?}; expected auto, adaptive, or non-adaptive"),
    };
    Ok(Output {
        json: json!({
            "bits": value.bits,
            "argmin_label": value.argmin.label(),
            "n_measurements": value.n_measurements,
        }),
        human: format!(
            "H = {:.9} bits  (argmin {}, searched {} measurements)",
            value.bits,
            value.argmin.label(),
            value.n_measurements
        ),
    })
}

fn conditional(args: &crate::ConditionalArgs) -> Result<Output> {
    let s = parse_state(&args.state)?;
    let a = parse_parties(&args.a, s.system())?;
    let b = parse_parties(&args.b, s.system())?;
    if a.is_empty() {
        bail!("--A must name at least one party");
    }
    let mut keep: Vec<usize> = a.iter().chain(&b).copied().collect();
    keep.sort_unstable();
    keep.dedup();
    if keep.len() != a.len() + b.len() {
        bail!("--A and --B must be disjoint");
    }
    // Parties outside A∪B are discarded first, per the conditional-entropy
    // contract.
    let reduced = s.marginal(&keep)?;
    let pos = |p: usize| keep.binary_search(&p).expect("member of keep");
    let a_pos: Vec<usize> = a.iter().map(|&p| pos(p)).collect();
    let b_pos: Vec<usize> = b.iter().map(|&p| pos(p)).collect();
    let bits = conditional_entropy(&reduced, &a_pos, &b_pos)?;
    Ok(Output {
        json: json!({ "bits": bits, "a": a, "b": b }),
        human: format!("H(A|B) = {bits:.9} bits  (A = {a:?}, B = {b:?})"),
    })
}

fn chsh(args: &crate::ChshArgs) -> Result<Output> {
    match (&args.state, &args.max) {
        (Some(spec), None) => {
            let s = parse_state(spec)?;
            let value = chsh_value(&s)?;
            let check = tsirelson_check(value);
            Ok(Output {
                json: json!({ "S": value, "tsirelson": check }),
                human: format!("S = {:.9}\n{}", value, format_report(&check)),
            })
        }
        (None, Some(which)) if which == "classical" => {
            let result = max_classical_chsh()?;
            Ok(Output {
                human: format!(
                    "max classical S = {:.9}  (deterministic strategy a = {:?}, b = {:?})",
                    result.s, result.a, result.b
                ),
                json: serde_json::to_value(&result)?,
            })
        }
        (None, Some(_)) => {
            let result = max_quantum_chsh()?;
            Ok(Output {
                human: format!(
                    "max quantum S = {:.9}  (grid {:.9}; angles alice = {:?}, bob = {:?})",
                    result.s, result.grid_s, result.angles.alice, result.angles.bob
                ),
                json: serde_json::to_value(&result)?,
            })
        }
        _ => bail!("pass exactly one of --state or --max"),
    }
}

fn transcript_for(s: StateTable, n: usize, m: usize) -> Result<IcTranscript> {
    let two_gbits = SystemType::from_pairs(&[(2, 2), (2, 2)]);
    let transcript_system = SystemType::from_pairs(&[(1, 2), (1, 2), (1, 2), (2, 2)]);
    if s.system() == &two_gbits {
        Ok(transcript_from_box(&s)?)
    } else if s.system() == &transcript_system {
        if (n, m) != (2, 1) {
            bail!("a one-box transcript has n = 2, m = 1");
        }
        Ok(IcTranscript { state: s, n, m })
    } else {
        bail!(
            "chain/lemma4 need a two-gbit box (which gets transcribed) or a \
             4-party transcript state"
        )
    }
}

fn chain_human(trace: &ProofChainTrace) -> String {
    let mut lines = vec![format!(
        "proof chain: I = {:.9} bits, m = {}, first failing step: {}",
        trace.i_bits,
        trace.m,
        trace.first_failing_name().unwrap_or("none (all hold)")
    )];
    for (idx, step) in trace.steps.iter().enumerate() {
        lines.push(format!("  step {idx}: {}", format_report(step)));
    }
    lines.join("\n")
}

fn check(args: &crate::CheckArgs) -> Result<Output> {
    let s = parse_state(&args.state)?;
    let n_parties = s.n_parties();
    let subset = |spec: &Option<String>| -> Result<Option<Vec<usize>>> {
        spec.as_deref()
            .map(|raw| parse_parties(raw, s.system()))
            .transpose()
    };
    let a_flag = subset(&args.a)?;
    let b_flag = subset(&args.b)?;
    let c_flag = subset(&args.c)?;
    let d_flag = subset(&args.d)?;
    let rest_of = |taken: &[usize]| -> Vec<usize> {
        (0..n_parties).filter(|p| !taken.contains(p)).collect()
    };

    let report = match args.ineq.as_str() {
        "dpi" => {
            let a = a_flag.unwrap_or_else(|| vec![0]);
            let b = b_flag.unwrap_or_else(|| rest_of(&a));
            let t = match (&args.wire, &args.discard) {
                (Some(spec), None) => {
                    let (party, setting) = spec
                        .split_once(':')
                        .ok_or_else(|| anyhow!("--wire expects party:setting"))?;
                    Transformation::Wiring {
                        party: parse_parties(party, s.system())?
                            .first()
                            .copied()
                            .ok_or_else(|| anyhow!("--wire needs a party"))?,
                        setting: setting.trim().parse().context("--wire setting")?,
                    }
                }
                (None, spec) => {
                    let parties = match spec {
                        Some(raw) => parse_parties(raw, s.system())?,
                        None => b.clone(),
                    };
                    Transformation::Discard { parties }
                }
                (Some(_), Some(_)) => bail!("pass at most one of --wire and --discard"),
            };
            check_dpi(&s, &a, &b, &t)?
        }
        "ssa" => {
            let a = a_flag.unwrap_or_else(|| vec![0]);
            let d = d_flag.unwrap_or_else(|| vec![1]);
            let c = c_flag.unwrap_or_else(|| {
                (0..n_parties)
                    .filter(|p| !a.contains(p) && !d.contains(p))
                    .collect()
            });
            check_ssa(&s, &a, &c, &d)?
        }
        "subadditivity" => {
            let a = a_flag.unwrap_or_else(|| vec![0]);
            let b = b_flag.unwrap_or_else(|| rest_of(&a));
            check_subadditivity(&s, &a, &b)?
        }
        "lemma1" => {
            let gamma = match &args.gamma {
                Some(raw) => parse_parties(raw, s.system())?,
                None => Vec::new(),
            };
            let groups = match &args.groups {
                Some(raw) => parse_groups(raw, s.system())?,
                None => (0..n_parties)
                    .filter(|p| !gamma.contains(p))
                    .map(|p| vec![p])
                    .collect(),
            };
            check_lemma(&s, 1, &LemmaParams::Grouping { groups, gamma })?
        }
        "lemma2" => {
            let a = a_flag.unwrap_or_else(|| vec![0]);
            let b = b_flag.unwrap_or_else(|| rest_of(&a));
            check_lemma(&s, 2, &LemmaParams::Bipartition { a, b })?
        }
        "lemma3" => {
            let x = a_flag.unwrap_or_else(|| {
                (0..n_parties)
                    .filter(|&p| s.system().parties[p].is_classical())
                    .collect()
            });
            let y = b_flag.unwrap_or_else(|| rest_of(&x));
            check_lemma(&s, 3, &LemmaParams::ClassicalConditional { x, y })?
        }
        "lemma4" => {
            let t = transcript_for(s, args.n, args.m)?;
            check_lemma(&t.state, 4, &LemmaParams::Game { n: args.n, m: args.m })?
        }
        "chain" => {
            let t = transcript_for(s, args.n, args.m)?;
            let trace = trace_theorem2_chain(&t, args.n, args.m)?;
            return Ok(Output {
                human: chain_human(&trace),
                json: serde_json::to_value(&trace)?,
            });
        }
        other => bail!(
            "unknown inequality {other:?}; expected dpi, ssa, subadditivity, \
             lemma1, lemma2, lemma3, lemma4, or chain"
        ),
    };
    Ok(Output {
        human: format_report(&report),
        json: serde_json::to_value(&report)?,
    })
}

fn search(args: &crate::SearchArgs, seed: u64) -> Result<Output> {
    let kind = InequalityKind::parse(&args.ineq)?;
    let outcome = search_counterexamples(&SearchConfig {
        kind,
        trials: args.trials,
        seed,
        system: None,
    })?;
    let human = format!(
        "{} search: {} trials, {} violations\nbest: {}{}",
        kind.name(),
        outcome.n_trials,
        outcome.n_violations,
        format_report(&outcome.best),
        outcome
            .best
            .witness
            .trial
            .map(|t| format!("  (trial {t})"))
            .unwrap_or_default()
    );
    Ok(Output {
        json: serde_json::to_value(&outcome)?,
        human,
    })
}

fn icgame(args: &crate::IcgameArgs, seed: u64) -> Result<Output> {
    if let Some(crate::IcgameSub::Sweep(sweep)) = &args.sweep {
        let rows = ic_threshold_sweep(sweep.emin, sweep.emax, sweep.step, sweep.kmax)?;
        let mut csv = String::from("E,k,success,I,I_over_m\n");
        for row in &rows {
            csv.push_str(&format!(
                "{:.6},{},{:.12},{:.12},{:.12}\n",
                row.e, row.k, row.success, row.i_bits, row.i_over_m
            ));
        }
        csv.pop();
        return Ok(Output {
            json: serde_json::to_value(&rows)?,
            human: csv,
        });
    }
    let e = args.e.ok_or_else(|| anyhow!("icgame needs --E (or the sweep subcommand)"))?;
    let k = args.k.ok_or_else(|| anyhow!("icgame needs --k"))?;
    let mode = match args.mode.as_str() {
        "analytic" => GameMode::Analytic,
        "montecarlo" => GameMode::MonteCarlo { trials: args.trials },
        other => bail!("unknown mode {other:?}; expected analytic or montecarlo"),
    };
    let result = gpt_core::play(&GameConfig { e, k, mode }, seed)?;
    let mut doc = serde_json::to_value(result)?;
    let i_over_m = result.i_bits / result.m as f64;
    doc["i_over_m"] = json!(i_over_m);
    if k == 1 {
        let transcript = transcript_from_box(&parse_state(&format!("isotropic:{e}"))?)?;
        doc["transcript"] = serde_json::to_value(&transcript.state)?;
    }
    Ok(Output {
        json: doc,
        human: format!(
            "E = {e}, k = {k}: per-bit success = {:.9}, I = {:.9} bits, I/m = {:.9} ({})",
            result.success,
            result.i_bits,
            i_over_m,
            if i_over_m > 1.0 + gpt_core::ENTROPY_TOL {
                "violates I <= m"
            } else {
                "respects I <= m"
            }
        ),
    })
}

fn state(args: &crate::StateArgs) -> Result<Output> {
    let s = parse_state(&args.state)?;
    let report = s.validate();
    let human = format!(
        "system: {:?}\nvalid: {} (bound dev {:.3e}, normalization dev {:.3e}, \
         no-signalling dev {:.3e})\n{}",
        s.system()
            .parties
            .iter()
            .map(|p| (p.settings, p.outcomes))
            .collect::<Vec<_>>(),
        report.pass,
        report.max_bound_deviation,
        report.max_normalization_deviation,
        report.no_signalling_deviation,
        serde_json::to_string_pretty(&s)?
    );
    Ok(Output {
        json: json!({ "state": s, "validation": report }),
        human,
    })
}
