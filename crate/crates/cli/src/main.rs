//! `gpt-entropy`: command-line access to the GPT entropy toolkit.
//!
//! Every subcommand prints a human-readable summary by default and a JSON
//! document (with an embedded run manifest) under `--json`. All randomness
//! flows from the single `--seed` flag; re-running a command with the same
//! arguments and seed reproduces every numeric output.
//!
//! Exit codes: 0 on success (including checks whose verdict is `violated` —
//! finding a violation is a successful run), 1 on runtime errors or when
//! `paper-examples` detects a mismatch, 2 on usage errors.

mod commands;
mod examples;
mod manifest;
mod states;

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gpt-entropy",
    version,
    about = "Measurement entropy, entropic inequalities, and the information-causality game \
             for no-signalling probability tables"
)]
pub struct Cli {
    /// Emit machine-readable JSON with an embedded run manifest.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for every randomized operation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Measurement entropy of a state: the minimum Shannon entropy over
    /// enumerated fine-grained measurements.
    Entropy(EntropyArgs),
    /// Conditional entropy H(A|B) = H(AB) − H(B). Parties outside A∪B are
    /// discarded first.
    Conditional(ConditionalArgs),
    /// CHSH value of a two-gbit state, or the classical/quantum maxima.
    Chsh(ChshArgs),
    /// Run one entropic-inequality check (or the full proof chain) on a state.
    Check(CheckArgs),
    /// Randomized counterexample search for an inequality.
    Search(SearchArgs),
    /// The information-causality game: single runs or threshold sweeps.
    Icgame(IcgameArgs),
    /// Reproduce the bundled closed-form landmark values in one run;
    /// exits 1 with a diff table if anything drifts.
    PaperExamples,
    /// Print a state's table and its validation report.
    State(StateArgs),
}

#[derive(Args)]
pub struct EntropyArgs {
    /// Named state (pr, isotropic:E, ssa-example, uniform-gbit, noise,
    /// classical-box, classical:p1,p2,..., gbit-vertex:V) or @path.json.
    #[arg(long)]
    pub state: String,
    /// Measurement family: auto (adaptive when ≤ 3 parties), adaptive,
    /// or non-adaptive.
    #[arg(long, default_value = "auto")]
    pub mode: String,
}

#[derive(Args)]
pub struct ConditionalArgs {
    #[arg(long)]
    pub state: String,
    /// Parties of A: comma-separated indices or aliases (x0, x1, Z / A, B /
    /// a0, a1, x, ZB depending on arity).
    #[arg(long = "A")]
    pub a: String,
    /// Parties of B; "none" conditions on nothing.
    #[arg(long = "B")]
    pub b: String,
}

#[derive(Args)]
pub struct ChshArgs {
    /// State to evaluate; omit when using --max.
    #[arg(long)]
    pub state: Option<String>,
    /// Compute a sector maximum instead: "classical" (exhaustive
    /// deterministic strategies) or "quantum" (singlet angle optimization).
    #[arg(long, value_parser = ["classical", "quantum"])]
    pub max: Option<String>,
}

#[derive(Args)]
pub struct CheckArgs {
    /// dpi, ssa, subadditivity, lemma1, lemma2, lemma3, lemma4, or chain.
    #[arg(long)]
    pub ineq: String,
    #[arg(long)]
    pub state: String,
    /// Parties of A (dpi/ssa/subadditivity/lemma2; X for lemma3).
    #[arg(long = "A")]
    pub a: Option<String>,
    /// Parties of B (dpi/subadditivity/lemma2; Y for lemma3).
    #[arg(long = "B")]
    pub b: Option<String>,
    /// Parties of C (ssa; may be "none").
    #[arg(long = "C")]
    pub c: Option<String>,
    /// Parties of D (ssa: the discarded conditioner).
    #[arg(long = "D")]
    pub d: Option<String>,
    /// Outcome groups for lemma1, semicolon-separated party lists
    /// (e.g. "0;1" or "0,1;2").
    #[arg(long)]
    pub groups: Option<String>,
    /// Conditioning parties gamma for lemma1.
    #[arg(long)]
    pub gamma: Option<String>,
    /// DPI transformation: discard these B-parties (default: all of B).
    #[arg(long)]
    pub discard: Option<String>,
    /// DPI transformation: wire one B-party to a fixed setting, "party:setting".
    #[arg(long)]
    pub wire: Option<String>,
    /// Declared data bits for lemma4/chain (default 2).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Declared message bits for lemma4/chain (default 1).
    #[arg(long, default_value_t = 1)]
    pub m: usize,
}

#[derive(Args)]
pub struct SearchArgs {
    /// dpi, ssa, lemma1, lemma3, or subadditivity.
    #[arg(long)]
    pub ineq: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
}

#[derive(Args)]
pub struct IcgameArgs {
    #[command(subcommand)]
    pub sweep: Option<IcgameSub>,
    /// Box correlator E ∈ [0,1].
    #[arg(long = "E")]
    pub e: Option<f64>,
    /// Nesting depth k ≥ 1 (Alice holds 2^k bits).
    #[arg(long)]
    pub k: Option<usize>,
    /// analytic or montecarlo.
    #[arg(long, default_value = "analytic")]
    pub mode: String,
    /// Samples for montecarlo mode.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Subcommand)]
pub enum IcgameSub {
    /// Analytic I/m over an E grid, as CSV (E,k,success,I,I_over_m).
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub emin: f64,
    #[arg(long)]
    pub emax: f64,
    #[arg(long)]
    pub step: f64,
    #[arg(long)]
    pub kmax: usize,
}

#[derive(Args)]
pub struct StateArgs {
    #[arg(long)]
    pub state: String,
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("GPT_ENTROPY_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                // Ignore the error if a pool already exists (e.g. in tests).
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    match commands::run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
