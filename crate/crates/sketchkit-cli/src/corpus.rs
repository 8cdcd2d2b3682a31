//! The bundled corpus and its golden suite.
//!
//! The corpus ships inside the binary so `sketchkit corpus run` works from
//! any directory. The golden tables encode the decided behaviour of every
//! corpus sequent: which outer inclusions are constructible, which base
//! structures admit verifications, and which inner inclusions are
//! unconditional of finite kind.

use serde_json::json;
use sketchkit::construct::{certify_constructible, replay_certificate, CertifyOutcome, SearchBudget};
use sketchkit::dsl::{parse_document, Document};
use sketchkit::sequents::exists_verification;
use sketchkit::sequents::is_unconditional_finite_kind;
use sketchkit::Budget;

use crate::commands::{CliError, CommandOutput};
use crate::report::Verdict;

/// The corpus source text, verbatim.
pub const CORPUS: &str = include_str!("../corpus/corpus.sk");

/// Parse the bundled corpus. Infallible on an intact installation.
pub fn corpus_document() -> Result<Document, CliError> {
    parse_document(CORPUS).map_err(|e| CliError::Parse(format!("bundled corpus is broken: {e}")))
}

/// Expected constructibility verdict per sequent (true = certified).
pub const CONSTRUCTIBLE_EXPECTATIONS: &[(&str, bool)] = &[
    ("IsoSeq", true),
    ("MonoSeq", true),
    ("EpiSeq", true),
    ("TerminalSeq", true),
    ("ZeroSeq", true),
    ("ProdSeq", true),
    ("ProdSeqPair", true),
    ("AtMostOneSeq", true),
    ("ReflSeq2", true),
    ("PullbackSeq", true),
    ("RegEpiFixedSeq", true),
    ("BiprodSeq", true),
    ("AcSeq", false),
    ("ReflSeq1", false),
    ("RegEpiRawSeq", false),
];

/// Expected strict-verification verdict per (sequent, base structure).
pub const VERIFY_EXPECTATIONS: &[(&str, &str, bool)] = &[
    ("IsoSeq", "F_iso2", true),
    ("IsoSeq", "F_two", false),
    ("IsoSeq", "F_parfork_h", false),
    ("MonoSeq", "F_two", true),
    ("MonoSeq", "F_parfork_h", false),
    ("EpiSeq", "F_two", true),
    ("EpiSeq", "F_parfork_h", true),
    ("AcSeq", "F_iso2", true),
    ("AcSeq", "F_two", false),
    ("TerminalSeq", "E_one", true),
    ("TerminalSeq", "E_parforkop", false),
    ("ZeroSeq", "E_one", true),
    ("ZeroSeq", "E_vee", false),
    ("ProdSeq", "E_b2", true),
    ("ProdSeq", "E_vee", false),
    ("ProdSeqPair", "G_b2_ab", true),
    ("ProdSeqPair", "G_vee_ab", false),
    ("AtMostOneSeq", "F_parfork_x", false),
    ("ReflSeq1", "F_rel_b2", true),
    ("ReflSeq2", "F_rel_b2", true),
    ("PullbackSeq", "E_b2", true),
    ("PullbackSeq", "E_vee", false),
    ("RegEpiFixedSeq", "E_b2", true),
    ("BiprodSeq", "E_one", true),
    ("BiprodSeq", "E_b2", false),
];

/// Expected unconditionality of the inner inclusion per sequent.
pub const UNCONDITIONAL_EXPECTATIONS: &[(&str, bool)] = &[
    ("IsoSeq", true),
    ("MonoSeq", true),
    ("ProdSeq", true),
    ("ReflSeq1", true),
    ("ReflSeq2", true),
    ("BiprodSeq", true),
    ("AcSeq", false),
];

struct Member {
    check: &'static str,
    subject: String,
    expected: String,
    actual: String,
}

impl Member {
    fn ok(&self) -> bool {
        self.expected == self.actual
    }
}

/// `corpus run`: evaluate every golden expectation and summarize.
pub fn run_corpus(budget: Budget, search: SearchBudget) -> Result<CommandOutput, CliError> {
    let doc = corpus_document()?;
    let mut members: Vec<Member> = Vec::new();

    for (name, expect_certified) in CONSTRUCTIBLE_EXPECTATIONS {
        let seq = doc
            .sequent(name)
            .ok_or_else(|| CliError::Input(format!("corpus is missing sequent `{name}`")))?;
        let actual = match certify_constructible(&seq.sequent.a, &seq.sequent.b, search)? {
            CertifyOutcome::Certified(cert) => {
                if replay_certificate(&cert, &seq.sequent.a, &seq.sequent.b) {
                    "certified".to_string()
                } else {
                    "certified-but-replay-failed".to_string()
                }
            }
            CertifyOutcome::Refused(_) => "refused".to_string(),
        };
        members.push(Member {
            check: "constructible",
            subject: (*name).to_string(),
            expected: if *expect_certified { "certified" } else { "refused" }.to_string(),
            actual,
        });
    }

    for (seq_name, st_name, expect_holds) in VERIFY_EXPECTATIONS {
        let seq = doc
            .sequent(seq_name)
            .ok_or_else(|| CliError::Input(format!("corpus is missing sequent `{seq_name}`")))?;
        let st = doc
            .structure(st_name)
            .ok_or_else(|| CliError::Input(format!("corpus is missing structure `{st_name}`")))?;
        let category = doc.category(&st.structure.category).ok_or_else(|| {
            CliError::Input(format!("corpus is missing category `{}`", st.structure.category))
        })?;
        let decision = exists_verification(&seq.sequent, &st.structure, category, budget)?;
        members.push(Member {
            check: "verify",
            subject: format!("{seq_name}/{st_name}"),
            expected: if *expect_holds { "holds" } else { "fails" }.to_string(),
            actual: if decision.holds { "holds" } else { "fails" }.to_string(),
        });
    }

    for (name, expect) in UNCONDITIONAL_EXPECTATIONS {
        let seq = doc
            .sequent(name)
            .ok_or_else(|| CliError::Input(format!("corpus is missing sequent `{name}`")))?;
        let actual = is_unconditional_finite_kind(&seq.sequent);
        members.push(Member {
            check: "unconditional",
            subject: (*name).to_string(),
            expected: if *expect { "yes" } else { "no" }.to_string(),
            actual: if actual { "yes" } else { "no" }.to_string(),
        });
    }

    let passed = members.iter().filter(|m| m.ok()).count();
    let subject_width = members.iter().map(|m| m.subject.len()).max().unwrap_or(0);
    let mut lines = Vec::with_capacity(members.len() + 1);
    for m in &members {
        lines.push(format!(
            "{} {:<14} {:<width$} expected {:<9} got {}",
            if m.ok() { "ok  " } else { "FAIL" },
            m.check,
            m.subject,
            m.expected,
            m.actual,
            width = subject_width,
        ));
    }
    lines.push(format!("golden suite: {passed}/{} expectations hold", members.len()));

    let details: Vec<serde_json::Value> = members
        .iter()
        .map(|m| {
            json!({
                "check": m.check,
                "subject": m.subject,
                "expected": m.expected,
                "actual": m.actual,
                "ok": m.ok(),
            })
        })
        .collect();
    Ok(CommandOutput {
        verdict: if passed == members.len() { Verdict::Pass } else { Verdict::Fail },
        details: json!({
            "members": details,
            "total": members.len(),
            "passed": passed,
        }),
        human: lines.join("\n"),
    })
}
