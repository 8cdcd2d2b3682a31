//! Shared error and validation-report types.

use serde::Serialize;

/// Errors surfaced by operations whose preconditions go beyond well-formed
/// input (budgets, caps, name resolution, invertibility).
///
/// Semantic failures of *data* (an invalid sketch, a non-commuting
/// structure) are not errors: validation returns a [`ValidationReport`]
/// and deciders return negative decisions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A name did not resolve against the expected carrier.
    #[error("unresolved name `{name}`: {context}")]
    Unresolved { name: String, context: String },

    /// The enumeration bound would exceed the configured budget.
    #[error("enumeration budget exceeded: {bound} candidate bound > {max} allowed ({context})")]
    BudgetExceeded {
        bound: String,
        max: u64,
        context: String,
    },

    /// A brute-force section search hit its cap before finishing.
    #[error("search cap exceeded: more than {cap} candidates ({context})")]
    CapExceeded { cap: u64, context: String },

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An arrow required to be invertible has no two-sided inverse.
    #[error("arrow `{arrow}` is not invertible in `{category}`")]
    NotInvertible { arrow: String, category: String },
}

/// One failed constraint, with enough context to locate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Where the problem sits, e.g. `edge f` or `commutativity[2]`.
    pub location: String,
    /// What is wrong, in one sentence.
    pub message: String,
}

impl Violation {
    pub fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            location: location.into(),
            message: message.into(),
        }
    }
}

/// Outcome of validating a piece of data: valid iff no violations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn valid() -> Self {
        ValidationReport::default()
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation::new(location, message));
    }

    /// Absorb another report, prefixing its locations.
    pub fn absorb(&mut self, prefix: &str, other: ValidationReport) {
        for v in other.violations {
            self.violations
                .push(Violation::new(format!("{prefix}{}", v.location), v.message));
        }
    }
}
