//! Parsing of `--state` specs and party-subset flags.

use anyhow::{anyhow, bail, Context, Result};
use gpt_core::{build_named_state, NamedState, StateTable, SystemType};

/// Resolve a `--state` argument: a named state or `@path.json`.
pub fn parse_state(spec: &str) -> Result<StateTable> {
    if let Some(path) = spec.strip_prefix('@') {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading state file {path}"))?;
        let table: StateTable =
            serde_json::from_str(&raw).with_context(|| format!("parsing state file {path}"))?;
        let report = table.validate();
        if !report.pass {
            bail!(
                "state file {path} is not a valid no-signalling table: \
                 bound deviation {:.3e}, normalization deviation {:.3e}, \
                 no-signalling deviation {:.3e}",
                report.max_bound_deviation,
                report.max_normalization_deviation,
                report.no_signalling_deviation
            );
        }
        return Ok(table);
    }
    let (head, tail) = match spec.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (spec, None),
    };
    let state = match (head, tail) {
        ("pr", None) => build_named_state(&NamedState::PrBox)?,
        ("isotropic", Some(e)) => {
            let e: f64 = e.parse().with_context(|| format!("isotropic E {e:?}"))?;
            build_named_state(&NamedState::IsotropicBox(e))?
        }
        ("ssa-example", None) => build_named_state(&NamedState::SsaExample)?,
        ("uniform-gbit", None) => {
            build_named_state(&NamedState::UniformNoise(SystemType::from_pairs(&[(2, 2)])))?
        }
        ("noise", None) => build_named_state(&NamedState::UniformNoise(SystemType::from_pairs(
            &[(2, 2), (2, 2)],
        )))?,
        ("classical-box", None) => gpt_core::classical_shared_randomness_box(),
        ("classical", Some(probs)) => {
            let dist: Vec<f64> = probs
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|e| anyhow!("{e}: {p:?}")))
                .collect::<Result<_>>()?;
            build_named_state(&NamedState::Classical(dist))?
        }
        ("gbit-vertex", Some(v)) => {
            let v: u8 = v.parse().with_context(|| format!("vertex index {v:?}"))?;
            build_named_state(&NamedState::GbitVertex(v))?
        }
        _ => bail!(
            "unknown state {spec:?}; expected pr, isotropic:E, ssa-example, uniform-gbit, \
             noise, classical-box, classical:p1,p2,..., gbit-vertex:V, or @path.json"
        ),
    };
    Ok(state)
}

/// Aliases for party indices, keyed by the arity of the state.
fn alias_table(n_parties: usize) -> &'static [(&'static str, usize)] {
    match n_parties {
        2 => &[("a", 0), ("b", 1)],
        3 => &[("x0", 0), ("x1", 1), ("z", 2)],
        4 => &[("a0", 0), ("a1", 1), ("x", 2), ("zb", 3), ("msg", 2), ("bob", 3)],
        _ => &[],
    }
}

/// Parse a comma-separated party list ("0,2", "x0", "x1,Z", "none").
pub fn parse_parties(spec: &str, system: &SystemType) -> Result<Vec<usize>> {
    let trimmed = spec.trim();
    if trimmed.is_empty() || trimmed.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    let aliases = alias_table(system.n_parties());
    let mut parties = Vec::new();
    for token in trimmed.split(',') {
        let token = token.trim();
        let idx = if let Ok(n) = token.parse::<usize>() {
            n
        } else {
            aliases
                .iter()
                .find(|(name, _)| token.eq_ignore_ascii_case(name))
                .map(|(_, idx)| *idx)
                .ok_or_else(|| {
                    anyhow!(
                        "unknown party {token:?} for a {}-party state (aliases: {})",
                        system.n_parties(),
                        aliases
                            .iter()
                            .map(|(n, _)| *n)
                            .collect::<Vec<_>>()
                            .join(", ")
                    )
                })?
        };
        if idx >= system.n_parties() {
            bail!("party index {idx} out of range for a {}-party state", system.n_parties());
        }
        parties.push(idx);
    }
    parties.sort_unstable();
    parties.dedup();
    Ok(parties)
}

/// Parse semicolon-separated groups of parties for lemma 1.
pub fn parse_groups(spec: &str, system: &SystemType) -> Result<Vec<Vec<usize>>> {
    spec.split(';')
        .map(|group| parse_parties(group, system))
        .collect()
}
