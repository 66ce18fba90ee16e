//! The run manifest embedded in every JSON output.

use serde::Serialize;
use serde_json::Value;

#[derive(Serialize)]
pub struct Tolerances {
    pub table: f64,
    pub entropy: f64,
}

#[derive(Serialize)]
pub struct RunManifest {
    /// The command line that produced this output.
    pub command: String,
    pub seed: u64,
    pub version: &'static str,
    pub tolerances: Tolerances,
    /// Wall-clock time of the run in milliseconds. The only field exempt
    /// from bit-identical reproduction.
    pub wall_ms: u128,
}

impl RunManifest {
    pub fn new(seed: u64, wall_ms: u128) -> Self {
        let command = std::iter::once("gpt-entropy".to_string())
            .chain(std::env::args().skip(1))
            .collect::<Vec<_>>()
            .join(" ");
        RunManifest {
            command,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            tolerances: Tolerances {
                table: gpt_core::TABLE_TOL,
                entropy: gpt_core::ENTROPY_TOL,
            },
            wall_ms,
        }
    }
}

/// Wrap a result value with its manifest into the final JSON document.
pub fn envelope(manifest: RunManifest, result: Value) -> Value {
    serde_json::json!({
        "manifest": manifest,
        "result": result,
    })
}
