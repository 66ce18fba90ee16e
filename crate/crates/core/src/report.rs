//! Check reports: the shared result format for every inequality checker.
//!
//! Margin convention: every check is normalized to the form `lhs ≤ rhs`
//! (equalities are two-sided). The margin is the *violation excess*
//!
//! ```text
//! margin = lhs − rhs
//! ```
//!
//! so `margin > tol` means the inequality is broken by that many bits,
//! `|margin| ≤ tol` is tight, and `margin < −tol` means it holds with slack.
//! A violated report's witness carries everything needed to re-evaluate both
//! sides from a cold start: the state(s), the partition, the transformation,
//! and the minimizing measurement labels.

use serde::{Deserialize, Serialize};

use crate::state::StateTable;
use crate::transform::Transformation;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Tight,
}

impl Verdict {
    /// Holds-or-tight: the sense in which a proof step "goes through".
    pub fn passes(&self) -> bool {
        matches!(self, Verdict::Holds | Verdict::Tight)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Tight => "tight",
        };
        f.write_str(s)
    }
}

/// Everything needed to reproduce a check outside the checker.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_after: Option<StateTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transformation: Option<Transformation>,
    /// `(term, minimizing measurement label)` for each entropy in the check.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub argmin: Vec<(String, String)>,
    /// Worst no-signalling witness: the kept party subset…
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    /// …and the two complement setting vectors whose marginals disagree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings_a: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings_b: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Trial index and per-trial seed when produced by a randomized search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs_bits: f64,
    pub rhs_bits: f64,
    /// `lhs_bits − rhs_bits`; positive beyond tolerance = violated.
    pub margin: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub witness: Witness,
}

impl CheckReport {
    /// Report for a one-sided inequality `lhs ≤ rhs`.
    pub fn inequality(
        name: impl Into<String>,
        lhs_bits: f64,
        rhs_bits: f64,
        tolerance: f64,
        witness: Witness,
    ) -> Self {
        let margin = lhs_bits - rhs_bits;
        let verdict = if margin > tolerance {
            Verdict::Violated
        } else if margin < -tolerance {
            Verdict::Holds
        } else {
            Verdict::Tight
        };
        Self {
            name: name.into(),
            lhs_bits,
            rhs_bits,
            margin,
            verdict,
            tolerance,
            witness,
        }
    }

    /// Report for a two-sided equality `lhs = rhs` (tight or violated only).
    pub fn equality(
        name: impl Into<String>,
        lhs_bits: f64,
        rhs_bits: f64,
        tolerance: f64,
        witness: Witness,
    ) -> Self {
        let margin = lhs_bits - rhs_bits;
        let verdict = if margin.abs() <= tolerance {
            Verdict::Tight
        } else {
            Verdict::Violated
        };
        Self {
            name: name.into(),
            lhs_bits,
            rhs_bits,
            margin,
            verdict,
            tolerance,
            witness,
        }
    }

    /// Report with an explicitly chosen verdict (used by structural checks
    /// like no-signalling where "tight" has no meaning).
    pub fn with_verdict(
        name: impl Into<String>,
        lhs_bits: f64,
        rhs_bits: f64,
        verdict: Verdict,
        tolerance: f64,
        witness: Witness,
    ) -> Self {
        Self {
            name: name.into(),
            lhs_bits,
            rhs_bits,
            margin: lhs_bits - rhs_bits,
            verdict,
            tolerance,
            witness,
        }
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} (lhs={:.9}, rhs={:.9}, margin={:+.9}, tol={:.0e})",
            self.name, self.verdict, self.lhs_bits, self.rhs_bits, self.margin, self.tolerance
        )
    }
}
