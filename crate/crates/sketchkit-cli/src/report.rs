//! The machine-readable report emitted by every invocation.

use serde::Serialize;

/// Bumped whenever a field is added, removed, or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// Overall outcome of one invocation.
///
/// `Pass` and `Fail` are decisions about well-formed input; `Error` means
/// the question could not be decided (unparsable input, unknown names,
/// exhausted budgets).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

/// One invocation's result. Serialized as JSON on standard output when
/// `--json` is set; field order and map ordering are stable, so identical
/// inputs produce byte-identical reports (pass `--zero-elapsed` to also
/// pin the timing field).
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Vec<String>,
    pub verdict: Verdict,
    pub details: serde_json::Value,
    pub elapsed_ms: u64,
}
