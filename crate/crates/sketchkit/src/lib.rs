//! Finite sketches and their exactness properties.
//!
//! A sketch is a finite graph together with commutativity conditions (pairs
//! of parallel paths) and convergence conditions (finite limit/colimit
//! specifications). Sketches are interpreted in finite categories by
//! structures; inclusions of sketches give rise to exactness sequents whose
//! validity, verification, and constructibility this crate decides.
//!
//! Module map:
//! - [`kernel`] — graphs, paths, conditions, sketches, morphisms, duality.
//! - [`fincat`] — finite categories as composition tables, cones, limits.
//! - [`models`] — structures (sketch interpretations), transformations,
//!   fibres, transport along isomorphisms.
//! - [`sequents`] — exactness sequents and the verification deciders.
//! - [`construct`] — constructibility certificates: search and replay.
//! - [`dsl`] — the `.sk` text format: parser and serializer.

pub mod construct;
pub mod dsl;
pub mod error;
pub mod fincat;
pub mod kernel;
pub mod models;
pub mod sequents;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Violation};

/// Resource bound for exhaustive enumeration.
///
/// Enumeration counts the candidates it actually explores (vertex
/// assignments and edge combinations) and refuses with
/// [`Error::BudgetExceeded`] once the count passes `max_candidates`,
/// rather than silently running for hours. Hom-sparse categories therefore
/// enumerate large sketches cheaply even though the worst-case candidate
/// space is exponential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_candidates: u64,
}

impl Budget {
    pub const fn new(max_candidates: u64) -> Self {
        Budget { max_candidates }
    }
}

impl Default for Budget {
    /// Ten million candidates: ample for desk-scale inputs, refuses blowups.
    fn default() -> Self {
        Budget::new(10_000_000)
    }
}
