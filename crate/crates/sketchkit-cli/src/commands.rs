//! One function per subcommand, shared between the binary and the tests.
//!
//! Each command takes a resolved [`Document`] plus its arguments and
//! returns a [`CommandOutput`]: the verdict, the JSON details payload, and
//! the human-readable text. Failures that prevent a decision are
//! [`CliError`]s, which carry the exit code.

use std::fmt;
use std::path::Path;

use serde_json::json;
use sketchkit::construct::{certify_constructible, replay_certificate, CertifyOutcome, SearchBudget};
use sketchkit::dsl::{parse_document, serialize_document, Decl, Document, ParseError};
use sketchkit::error::ValidationReport;
use sketchkit::fincat::validate_category;
use sketchkit::kernel::{strip_convergence, validate_sketch};
use sketchkit::models::validate_structure;
use sketchkit::sequents::{
    exists_functorial_verification, exists_verification, exists_verification_upto_iso,
    is_unconditional_finite_kind, validate_sequent, VerificationDecision,
};
use sketchkit::{Budget, Error};

use crate::report::Verdict;

/// Why an invocation could not reach a decision. The variant fixes the
/// exit code: parse/resolution/file problems exit 2, exhausted budgets
/// exit 3, and everything else about the input exits 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// The document (or an output path) could not be read or written.
    Io(String),
    /// The document text did not parse or resolve.
    Parse(String),
    /// The input parsed but the request does not make sense against it.
    Input(String),
    /// An enumeration or search bound was exhausted before a decision.
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Input(_) => 1,
            CliError::Budget(_) => 3,
        }
    }

    /// Stable machine-readable discriminator for the JSON report.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Parse(_) => "parse",
            CliError::Input(_) => "input",
            CliError::Budget(_) => "budget",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Parse(m) | CliError::Input(m) | CliError::Budget(m) => {
                write!(f, "{m}")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } | Error::CapExceeded { .. } => {
                CliError::Budget(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

/// A decided command: verdict, JSON payload, and the text a person reads.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub verdict: Verdict,
    pub details: serde_json::Value,
    pub human: String,
}

impl CommandOutput {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Error => 1,
        }
    }
}

/// Read and parse a document from disk.
pub fn load_document(path: &Path) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read `{}`: {e}", path.display())))?;
    Ok(parse_document(&text)?)
}

/// Which verification decider to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Strict extensions: every base extension must extend on the nose.
    Strict,
    /// Extensions found up to isomorphism over the base.
    Iso,
    /// A verification that is moreover functorial in the base.
    Functorial,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Iso => "iso",
            Mode::Functorial => "functorial",
        }
    }
}

/// `check`: validate every declaration in the document.
pub fn check(doc: &Document) -> Result<CommandOutput, CliError> {
    let mut all = ValidationReport::valid();
    for decl in &doc.decls {
        let (kind, report) = match decl {
            Decl::Category(c) => ("category", validate_category(&c.category)),
            Decl::Sketch(s) => ("sketch", validate_sketch(&s.sketch)),
            Decl::Sequent(s) => ("sequent", validate_sequent(&s.sequent)),
            Decl::Structure(st) => {
                let sketch = doc.sketch(&st.structure.sketch).ok_or_else(|| {
                    CliError::Input(format!(
                        "structure `{}` refers to unknown sketch `{}`",
                        st.name, st.structure.sketch
                    ))
                })?;
                let category = doc.category(&st.structure.category).ok_or_else(|| {
                    CliError::Input(format!(
                        "structure `{}` refers to unknown category `{}`",
                        st.name, st.structure.category
                    ))
                })?;
                ("structure", validate_structure(&st.structure, sketch, category))
            }
        };
        all.absorb(&format!("{kind} {}: ", decl.name()), report);
    }
    let verdict = if all.is_valid() { Verdict::Pass } else { Verdict::Fail };
    let human = if all.is_valid() {
        format!("checked {} declarations: all valid", doc.decls.len())
    } else {
        let mut lines = vec![format!(
            "checked {} declarations: {} violations",
            doc.decls.len(),
            all.violations.len()
        )];
        for v in &all.violations {
            lines.push(format!("  {}{}", v.location, v.message));
        }
        lines.join("\n")
    };
    Ok(CommandOutput {
        verdict,
        details: json!({
            "declarations": doc.decls.len(),
            "violations": all.violations,
        }),
        human,
    })
}

fn lookup_sequent<'d>(
    doc: &'d Document,
    name: &str,
) -> Result<&'d sketchkit::dsl::NamedSequent, CliError> {
    doc.sequent(name)
        .ok_or_else(|| CliError::Input(format!("no sequent named `{name}` in the document")))
}

fn summarize_decision(decision: &VerificationDecision) -> String {
    if decision.holds {
        format!(
            "verification exists ({} base structure{})",
            decision.witnesses.len(),
            if decision.witnesses.len() == 1 { "" } else { "s" }
        )
    } else {
        match &decision.counterexample {
            Some(g) => {
                let pins: Vec<String> = g
                    .vertex_map
                    .iter()
                    .map(|(k, v)| format!("{k} |-> {v}"))
                    .collect();
                format!("no verification: base {{{}}} does not extend", pins.join(", "))
            }
            None => "no verification: the bases extend, but not functorially".to_string(),
        }
    }
}

/// `verify`: decide whether the sequent admits a verification over the
/// named base structure, in the requested mode.
pub fn verify(
    doc: &Document,
    sequent: &str,
    structure: &str,
    mode: Mode,
    budget: Budget,
    cap: u64,
) -> Result<CommandOutput, CliError> {
    let seq = lookup_sequent(doc, sequent)?;
    let st = doc
        .structure(structure)
        .ok_or_else(|| CliError::Input(format!("no structure named `{structure}` in the document")))?;
    if st.structure.sketch != seq.x {
        return Err(CliError::Input(format!(
            "structure `{structure}` interprets sketch `{}`, but sequent `{sequent}` is based on `{}`",
            st.structure.sketch, seq.x
        )));
    }
    let category = doc.category(&st.structure.category).ok_or_else(|| {
        CliError::Input(format!(
            "structure `{structure}` refers to unknown category `{}`",
            st.structure.category
        ))
    })?;
    let seq_report = validate_sequent(&seq.sequent);
    if !seq_report.is_valid() {
        return Err(CliError::Input(format!(
            "sequent `{sequent}` is not well formed: {}",
            seq_report.violations[0].message
        )));
    }
    let st_report = validate_structure(&st.structure, &seq.sequent.x, category);
    if !st_report.is_valid() {
        return Err(CliError::Input(format!(
            "structure `{structure}` is not a valid interpretation: {}",
            st_report.violations[0].message
        )));
    }

    let decision = match mode {
        Mode::Strict => exists_verification(&seq.sequent, &st.structure, category, budget)?,
        Mode::Iso => exists_verification_upto_iso(&seq.sequent, &st.structure, category, budget)?,
        Mode::Functorial => {
            exists_functorial_verification(&seq.sequent, &st.structure, category, budget, cap)?
        }
    };
    let verdict = if decision.holds { Verdict::Pass } else { Verdict::Fail };
    let human = format!(
        "verify {sequent} over {structure} in {} ({}): {}",
        st.structure.category,
        mode.as_str(),
        summarize_decision(&decision)
    );
    Ok(CommandOutput {
        verdict,
        details: json!({
            "sequent": sequent,
            "structure": structure,
            "category": st.structure.category,
            "mode": mode.as_str(),
            "decision": decision,
        }),
        human,
    })
}

/// `constructible`: search for a certificate for the outer inclusion.
pub fn constructible(
    doc: &Document,
    sequent: &str,
    budget: SearchBudget,
) -> Result<CommandOutput, CliError> {
    let seq = lookup_sequent(doc, sequent)?;
    match certify_constructible(&seq.sequent.a, &seq.sequent.b, budget)? {
        CertifyOutcome::Certified(cert) => {
            let replays = replay_certificate(&cert, &seq.sequent.a, &seq.sequent.b);
            let human = format!(
                "constructible {sequent}: certified in {} steps (replay: {})",
                cert.steps.len(),
                if replays { "ok" } else { "FAILED" }
            );
            Ok(CommandOutput {
                verdict: if replays { Verdict::Pass } else { Verdict::Fail },
                details: json!({
                    "sequent": sequent,
                    "certified": true,
                    "replays": replays,
                    "certificate": cert,
                }),
                human,
            })
        }
        CertifyOutcome::Refused(refusal) => {
            let mut lines = vec![format!(
                "constructible {sequent}: refused ({} saturated frontier{})",
                refusal.frontiers.len(),
                if refusal.frontiers.len() == 1 { "" } else { "s" }
            )];
            for f in &refusal.frontiers {
                if !f.missing_edges.is_empty() {
                    lines.push(format!("  missing arrows: {}", f.missing_edges.join(", ")));
                }
                if !f.missing_vertices.is_empty() {
                    lines.push(format!("  missing objects: {}", f.missing_vertices.join(", ")));
                }
                for c in &f.missing_commutativities {
                    lines.push(format!("  missing condition: {c}"));
                }
                for c in &f.missing_convergences {
                    lines.push(format!("  missing condition: {c}"));
                }
            }
            Ok(CommandOutput {
                verdict: Verdict::Fail,
                details: json!({
                    "sequent": sequent,
                    "certified": false,
                    "frontiers": refusal.frontiers,
                }),
                human: lines.join("\n"),
            })
        }
    }
}

/// `unconditional`: is the inner inclusion unconditional of finite kind?
pub fn unconditional(doc: &Document, sequent: &str) -> Result<CommandOutput, CliError> {
    let seq = lookup_sequent(doc, sequent)?;
    let holds = is_unconditional_finite_kind(&seq.sequent);
    Ok(CommandOutput {
        verdict: if holds { Verdict::Pass } else { Verdict::Fail },
        details: json!({ "sequent": sequent, "unconditional": holds }),
        human: format!(
            "unconditional {sequent}: {}",
            if holds { "yes" } else { "no" }
        ),
    })
}

fn emit_text(out: Option<&Path>, text: &str, what: &str) -> Result<CommandOutput, CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", path.display())))?;
            Ok(CommandOutput {
                verdict: Verdict::Pass,
                details: json!({ "output": path.display().to_string() }),
                human: format!("{what} written to {}", path.display()),
            })
        }
        None => Ok(CommandOutput {
            verdict: Verdict::Pass,
            details: json!({ "text": text }),
            human: text.trim_end().to_string(),
        }),
    }
}

/// `dualize`: reverse every declaration and serialize the result.
pub fn dualize(doc: &Document, out: Option<&Path>) -> Result<CommandOutput, CliError> {
    let text = serialize_document(&doc.dualized());
    emit_text(out, &text, "dualized document")
}

/// `strip`: drop the convergence conditions of one sketch, keeping the
/// rest of the document intact.
pub fn strip(doc: &Document, sketch: &str, out: Option<&Path>) -> Result<CommandOutput, CliError> {
    let mut stripped = doc.clone();
    let mut found = false;
    for decl in &mut stripped.decls {
        if let Decl::Sketch(s) = decl {
            if s.name == sketch {
                s.sketch = strip_convergence(&s.sketch);
                found = true;
            }
        }
    }
    if !found {
        return Err(CliError::Input(format!("no sketch named `{sketch}` in the document")));
    }
    let text = serialize_document(&stripped);
    emit_text(out, &text, "stripped document")
}
