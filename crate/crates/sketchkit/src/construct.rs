//! Constructibility of subsketch inclusions, with replayable certificates.
//!
//! An inclusion `a ⊆ b` is constructible when `b` can be grown from `a`
//! inside `b` by the six elementary steps below. A certificate records one
//! such derivation; [`replay_certificate`] re-checks every step against
//! the pair of sketches, so a certificate is evidence independent of the
//! search that produced it.
//!
//! The steps, acting on a subsketch state of `b`:
//! - include a condition of `b` all of whose items are present;
//! - include an arrow of `b` together with a condition of `b` defining it
//!   as a composite (possibly empty) of present arrows;
//! - introduce the apex of a limit condition of `b` — apex not yet
//!   present, diagram fully present — along with its legs and the
//!   condition itself; dually for colimits;
//! - include an arrow of `b` into the apex of a present limit condition,
//!   induced by a present cone (a family of present arrows whose cone
//!   equations are present conditions), together with the conditions of
//!   `b` equating its composites with the legs to the family; dually out
//!   of a colimit apex.
//!
//! The search saturates the condition- and arrow-including steps (they
//! never add vertices, so they can only enable apex introductions, never
//! disable them) and backtracks over apex introductions only, memoizing
//! saturated states. A refusal therefore comes with the frontier of dead
//! ends: what was still missing when no step applied.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::Error;
use crate::kernel::{
    commutativity_items, convergence_items, is_subsketch_inclusion, CommutativityCondition,
    ConvergenceKind, Path, Sketch,
};

/// Bound on the number of saturated states the certificate search may
/// visit before giving up with a budget error (distinct from a refusal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl SearchBudget {
    pub const fn new(max_nodes: u64) -> Self {
        SearchBudget { max_nodes }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::new(100_000)
    }
}

/// A condition of the ambient sketch, by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionRef {
    Commutativity(usize),
    Convergence(usize),
}

/// One derivation step. All indices refer to the condition lists of the
/// ambient sketch `b`; all names refer to its graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum ConstructStep {
    /// Include a condition whose items are all present.
    IncludeCondition { condition: ConditionRef },
    /// Include `arrow` and a commutativity of `b` with `arrow` alone on
    /// one side and a present path on the other.
    IncludeDefinedArrow { arrow: String, condition: usize },
    /// Introduce the apex of a limit condition (not yet present) together
    /// with its legs and the condition; the diagram must be present.
    IntroduceLimitVertex { vertex: String, condition: usize },
    /// Dually, introduce the apex of a colimit condition.
    IntroduceColimitVertex { vertex: String, condition: usize },
    /// Include an arrow into the apex of a present limit condition,
    /// induced by the present cone `family`; `premises` are the present
    /// conditions making `family` a cone, `conclusions` the conditions of
    /// `b` equating `leg ∘ arrow` with the family, included with the
    /// arrow.
    IncludeInducedIntoLimit {
        arrow: String,
        condition: usize,
        /// Shape vertex -> present arrow from the arrow's source.
        family: BTreeMap<String, String>,
        /// One commutativity index per shape edge, already present.
        premises: Vec<usize>,
        /// One commutativity index per shape vertex, newly included.
        conclusions: Vec<usize>,
    },
    /// Dually, include an arrow out of the apex of a present colimit
    /// condition.
    IncludeInducedOutOfColimit {
        arrow: String,
        condition: usize,
        family: BTreeMap<String, String>,
        premises: Vec<usize>,
        conclusions: Vec<usize>,
    },
}

impl ConstructStep {
    /// Apex introductions add a vertex; everything else only adds arrows
    /// and conditions and is saturated greedily.
    pub fn introduces_vertex(&self) -> bool {
        matches!(
            self,
            ConstructStep::IntroduceLimitVertex { .. }
                | ConstructStep::IntroduceColimitVertex { .. }
        )
    }
}

/// A replayable derivation of `b` from `a`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ConstructibilityCertificate {
    pub steps: Vec<ConstructStep>,
}

/// A subsketch of the ambient sketch `b`: which vertices, edges, and
/// conditions (by index) are present.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubsketchState {
    pub vertices: BTreeSet<String>,
    pub edges: BTreeSet<String>,
    pub commutativities: BTreeSet<usize>,
    pub convergences: BTreeSet<usize>,
}

impl SubsketchState {
    pub fn is_complete(&self, b: &Sketch) -> bool {
        self.vertices.len() == b.graph.vertices.len()
            && self.edges.len() == b.graph.edges.len()
            && self.commutativities.len() == b.commutativities.len()
            && self.convergences.len() == b.convergences.len()
    }

    fn has_items(&self, items: &crate::kernel::Items) -> bool {
        items.is_within(&self.vertices, &self.edges)
    }

    /// Materialize the state as a sketch (declaration order from `b`).
    pub fn to_sketch(&self, b: &Sketch) -> Sketch {
        Sketch {
            graph: crate::kernel::Graph {
                vertices: b
                    .graph
                    .vertices
                    .iter()
                    .filter(|v| self.vertices.contains(*v))
                    .cloned()
                    .collect(),
                edges: b
                    .graph
                    .edges
                    .iter()
                    .filter(|e| self.edges.contains(&e.name))
                    .cloned()
                    .collect(),
            },
            commutativities: b
                .commutativities
                .iter()
                .enumerate()
                .filter(|(i, _)| self.commutativities.contains(i))
                .map(|(_, c)| c.clone())
                .collect(),
            convergences: b
                .convergences
                .iter()
                .enumerate()
                .filter(|(i, _)| self.convergences.contains(i))
                .map(|(_, c)| c.clone())
                .collect(),
        }
    }
}

/// Locate the subsketch `a` inside `b` as a state: items by name,
/// conditions by structural membership.
pub fn state_from_subsketch(a: &Sketch, b: &Sketch) -> Result<SubsketchState, Error> {
    let mut state = SubsketchState {
        vertices: a.graph.vertices.iter().cloned().collect(),
        edges: a.graph.edges.iter().map(|e| e.name.clone()).collect(),
        ..Default::default()
    };
    for c in &a.commutativities {
        let i = b
            .commutativities
            .iter()
            .position(|d| d == c)
            .ok_or_else(|| {
                Error::Precondition(format!("commutativity `{c}` is not a condition of the ambient sketch"))
            })?;
        state.commutativities.insert(i);
    }
    for c in &a.convergences {
        let i = b
            .convergences
            .iter()
            .position(|d| crate::kernel::conditions_equivalent(c, d))
            .ok_or_else(|| {
                Error::Precondition(format!("convergence `{c}` is not a condition of the ambient sketch"))
            })?;
        state.convergences.insert(i);
    }
    Ok(state)
}

fn err(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

/// Does the condition equate these two paths, in either orientation?
fn matches_pair(cond: &CommutativityCondition, p1: &Path, p2: &Path) -> bool {
    (cond.lhs == *p1 && cond.rhs == *p2) || (cond.lhs == *p2 && cond.rhs == *p1)
}

/// Check a step against a state and produce the extended state.
///
/// Every legality requirement is re-verified here, so replaying an
/// untrusted certificate cannot smuggle in an illegal step.
pub fn apply_step(
    state: &SubsketchState,
    b: &Sketch,
    step: &ConstructStep,
) -> Result<SubsketchState, Error> {
    let mut next = state.clone();
    match step {
        ConstructStep::IncludeCondition { condition } => match condition {
            ConditionRef::Commutativity(i) => {
                let cond = b
                    .commutativities
                    .get(*i)
                    .ok_or_else(|| err(format!("no commutativity at index {i}")))?;
                if state.commutativities.contains(i) {
                    return Err(err(format!("commutativity {i} already present")));
                }
                let items = commutativity_items(cond, &b.graph)
                    .ok_or_else(|| err("condition is not well-formed"))?;
                if !state.has_items(&items) {
                    return Err(err(format!("items of commutativity {i} not all present")));
                }
                next.commutativities.insert(*i);
            }
            ConditionRef::Convergence(i) => {
                let cond = b
                    .convergences
                    .get(*i)
                    .ok_or_else(|| err(format!("no convergence at index {i}")))?;
                if state.convergences.contains(i) {
                    return Err(err(format!("convergence {i} already present")));
                }
                let items = convergence_items(cond, &b.graph)
                    .ok_or_else(|| err("condition is not well-formed"))?;
                if !state.has_items(&items) {
                    return Err(err(format!("items of convergence {i} not all present")));
                }
                next.convergences.insert(*i);
            }
        },
        ConstructStep::IncludeDefinedArrow { arrow, condition } => {
            let e = b
                .graph
                .edge(arrow)
                .ok_or_else(|| err(format!("no edge `{arrow}`")))?;
            if state.edges.contains(arrow) {
                return Err(err(format!("edge `{arrow}` already present")));
            }
            let cond = b
                .commutativities
                .get(*condition)
                .ok_or_else(|| err(format!("no commutativity at index {condition}")))?;
            if state.commutativities.contains(condition) {
                return Err(err(format!("commutativity {condition} already present")));
            }
            let single = Path {
                start: e.source.clone(),
                edges: vec![arrow.clone()],
            };
            let other = if cond.lhs == single {
                &cond.rhs
            } else if cond.rhs == single {
                &cond.lhs
            } else {
                return Err(err(format!(
                    "commutativity {condition} does not define `{arrow}` as a composite"
                )));
            };
            let verts = other
                .vertices(&b.graph)
                .ok_or_else(|| err("defining path is not well-formed"))?;
            if !verts.iter().all(|v| state.vertices.contains(v)) {
                return Err(err("defining path passes through absent vertices"));
            }
            if !other.edges.iter().all(|x| state.edges.contains(x)) {
                return Err(err("defining path uses absent arrows"));
            }
            next.edges.insert(arrow.clone());
            next.commutativities.insert(*condition);
        }
        ConstructStep::IntroduceLimitVertex { vertex, condition } => {
            introduce_apex(state, &mut next, b, vertex, *condition, ConvergenceKind::Limit)?;
        }
        ConstructStep::IntroduceColimitVertex { vertex, condition } => {
            introduce_apex(state, &mut next, b, vertex, *condition, ConvergenceKind::Colimit)?;
        }
        ConstructStep::IncludeInducedIntoLimit {
            arrow,
            condition,
            family,
            premises,
            conclusions,
        } => {
            include_induced(
                state,
                &mut next,
                b,
                arrow,
                *condition,
                family,
                premises,
                conclusions,
                ConvergenceKind::Limit,
            )?;
        }
        ConstructStep::IncludeInducedOutOfColimit {
            arrow,
            condition,
            family,
            premises,
            conclusions,
        } => {
            include_induced(
                state,
                &mut next,
                b,
                arrow,
                *condition,
                family,
                premises,
                conclusions,
                ConvergenceKind::Colimit,
            )?;
        }
    }
    Ok(next)
}

fn introduce_apex(
    state: &SubsketchState,
    next: &mut SubsketchState,
    b: &Sketch,
    vertex: &str,
    ci: usize,
    kind: ConvergenceKind,
) -> Result<(), Error> {
    let cond = b
        .convergences
        .get(ci)
        .ok_or_else(|| err(format!("no convergence at index {ci}")))?;
    if cond.kind != kind {
        return Err(err(format!("convergence {ci} has the wrong orientation")));
    }
    if cond.apex != vertex {
        return Err(err(format!("convergence {ci} does not sit at `{vertex}`")));
    }
    if state.vertices.contains(vertex) {
        return Err(err(format!("vertex `{vertex}` already present")));
    }
    if state.convergences.contains(&ci) {
        return Err(err(format!("convergence {ci} already present")));
    }
    for h in &cond.shape.vertices {
        let img = cond
            .diagram
            .vertex(h)
            .ok_or_else(|| err("condition diagram is not total"))?;
        if !state.vertices.contains(img) {
            return Err(err(format!("diagram vertex image `{img}` not present")));
        }
    }
    for e in &cond.shape.edges {
        let img = cond
            .diagram
            .edge(&e.name)
            .ok_or_else(|| err("condition diagram is not total"))?;
        if !state.edges.contains(img) {
            return Err(err(format!("diagram edge image `{img}` not present")));
        }
    }
    next.vertices.insert(vertex.to_string());
    for leg in cond.legs.values() {
        if b.graph.edge(leg).is_none() {
            return Err(err(format!("leg `{leg}` is not an edge of the ambient sketch")));
        }
        next.edges.insert(leg.clone());
    }
    next.convergences.insert(ci);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn include_induced(
    state: &SubsketchState,
    next: &mut SubsketchState,
    b: &Sketch,
    arrow: &str,
    ci: usize,
    family: &BTreeMap<String, String>,
    premises: &[usize],
    conclusions: &[usize],
    kind: ConvergenceKind,
) -> Result<(), Error> {
    let cond = b
        .convergences
        .get(ci)
        .ok_or_else(|| err(format!("no convergence at index {ci}")))?;
    if cond.kind != kind {
        return Err(err(format!("convergence {ci} has the wrong orientation")));
    }
    if !state.convergences.contains(&ci) {
        return Err(err(format!("convergence {ci} is not present")));
    }
    let e = b
        .graph
        .edge(arrow)
        .ok_or_else(|| err(format!("no edge `{arrow}`")))?;
    if state.edges.contains(arrow) {
        return Err(err(format!("edge `{arrow}` already present")));
    }
    // The arrow runs between the apex and some present vertex `x`.
    let x = match kind {
        ConvergenceKind::Limit => {
            if e.target != cond.apex {
                return Err(err(format!("`{arrow}` does not target the apex")));
            }
            e.source.clone()
        }
        ConvergenceKind::Colimit => {
            if e.source != cond.apex {
                return Err(err(format!("`{arrow}` does not leave the apex")));
            }
            e.target.clone()
        }
    };
    if !state.vertices.contains(&x) {
        return Err(err(format!("vertex `{x}` is not present")));
    }
    if family.len() != cond.shape.vertices.len() {
        return Err(err("family does not match the shape vertices"));
    }
    for h in &cond.shape.vertices {
        let x_h = family
            .get(h)
            .ok_or_else(|| err(format!("family has no arrow at shape vertex `{h}`")))?;
        if !state.edges.contains(x_h) {
            return Err(err(format!("family arrow `{x_h}` is not present")));
        }
        let xe = b
            .graph
            .edge(x_h)
            .ok_or_else(|| err(format!("no edge `{x_h}`")))?;
        let d_h = cond
            .diagram
            .vertex(h)
            .ok_or_else(|| err("condition diagram is not total"))?;
        let ok = match kind {
            ConvergenceKind::Limit => xe.source == x && xe.target == d_h,
            ConvergenceKind::Colimit => xe.source == d_h && xe.target == x,
        };
        if !ok {
            return Err(err(format!("family arrow `{x_h}` has wrong endpoints")));
        }
    }
    // Premises: the family is a cone, witnessed by present conditions.
    if premises.len() != cond.shape.edges.len() {
        return Err(err("premise count does not match the shape edges"));
    }
    for (he, pi) in cond.shape.edges.iter().zip(premises) {
        if !state.commutativities.contains(pi) {
            return Err(err(format!("premise condition {pi} is not present")));
        }
        let pc = b
            .commutativities
            .get(*pi)
            .ok_or_else(|| err(format!("no commutativity at index {pi}")))?;
        let d_he = cond
            .diagram
            .edge(&he.name)
            .ok_or_else(|| err("condition diagram is not total"))?;
        let x_src = &family[&he.source];
        let x_tgt = &family[&he.target];
        let (p1, p2) = match kind {
            ConvergenceKind::Limit => (
                Path {
                    start: x.clone(),
                    edges: vec![x_src.clone(), d_he.to_string()],
                },
                Path {
                    start: x.clone(),
                    edges: vec![x_tgt.clone()],
                },
            ),
            ConvergenceKind::Colimit => {
                let d_src = cond
                    .diagram
                    .vertex(&he.source)
                    .ok_or_else(|| err("condition diagram is not total"))?;
                (
                    Path {
                        start: d_src.to_string(),
                        edges: vec![d_he.to_string(), x_tgt.clone()],
                    },
                    Path {
                        start: d_src.to_string(),
                        edges: vec![x_src.clone()],
                    },
                )
            }
        };
        if !matches_pair(pc, &p1, &p2) {
            return Err(err(format!(
                "premise condition {pi} does not equate the family over shape edge `{}`",
                he.name
            )));
        }
    }
    // Conclusions: the new arrow composed with each leg gives the family.
    if conclusions.len() != cond.shape.vertices.len() {
        return Err(err("conclusion count does not match the shape vertices"));
    }
    for (h, qi) in cond.shape.vertices.iter().zip(conclusions) {
        let qc = b
            .commutativities
            .get(*qi)
            .ok_or_else(|| err(format!("no commutativity at index {qi}")))?;
        let leg = cond
            .legs
            .get(h)
            .ok_or_else(|| err(format!("condition has no leg at `{h}`")))?;
        let x_h = &family[h];
        let (p1, p2) = match kind {
            ConvergenceKind::Limit => (
                Path {
                    start: x.clone(),
                    edges: vec![arrow.to_string(), leg.clone()],
                },
                Path {
                    start: x.clone(),
                    edges: vec![x_h.clone()],
                },
            ),
            ConvergenceKind::Colimit => {
                let d_h = cond
                    .diagram
                    .vertex(h)
                    .ok_or_else(|| err("condition diagram is not total"))?;
                (
                    Path {
                        start: d_h.to_string(),
                        edges: vec![leg.clone(), arrow.to_string()],
                    },
                    Path {
                        start: d_h.to_string(),
                        edges: vec![x_h.clone()],
                    },
                )
            }
        };
        if !matches_pair(qc, &p1, &p2) {
            return Err(err(format!(
                "conclusion condition {qi} does not equate `{arrow}` with the family at `{h}`"
            )));
        }
        next.commutativities.insert(*qi);
    }
    next.edges.insert(arrow.to_string());
    Ok(())
}

/// Every step applicable in the given state, in canonical order:
/// condition inclusions, arrow definitions, limit and colimit apex
/// introductions, induced arrows into limits, induced arrows out of
/// colimits. Each candidate is checked through [`apply_step`].
pub fn applicable_steps(state: &SubsketchState, b: &Sketch) -> Vec<ConstructStep> {
    let mut out = Vec::new();
    let push_checked = |step: ConstructStep, out: &mut Vec<ConstructStep>| {
        if apply_step(state, b, &step).is_ok() {
            out.push(step);
        }
    };

    for i in 0..b.commutativities.len() {
        push_checked(
            ConstructStep::IncludeCondition {
                condition: ConditionRef::Commutativity(i),
            },
            &mut out,
        );
    }
    for i in 0..b.convergences.len() {
        push_checked(
            ConstructStep::IncludeCondition {
                condition: ConditionRef::Convergence(i),
            },
            &mut out,
        );
    }

    for (i, cond) in b.commutativities.iter().enumerate() {
        if state.commutativities.contains(&i) {
            continue;
        }
        let mut arrows: Vec<&str> = Vec::new();
        if cond.lhs.edges.len() == 1 {
            arrows.push(&cond.lhs.edges[0]);
        }
        if cond.rhs.edges.len() == 1 && cond.rhs.edges != cond.lhs.edges {
            arrows.push(&cond.rhs.edges[0]);
        }
        for arrow in arrows {
            push_checked(
                ConstructStep::IncludeDefinedArrow {
                    arrow: arrow.to_string(),
                    condition: i,
                },
                &mut out,
            );
        }
    }

    for (i, cond) in b.convergences.iter().enumerate() {
        if cond.kind == ConvergenceKind::Limit {
            push_checked(
                ConstructStep::IntroduceLimitVertex {
                    vertex: cond.apex.clone(),
                    condition: i,
                },
                &mut out,
            );
        }
    }
    for (i, cond) in b.convergences.iter().enumerate() {
        if cond.kind == ConvergenceKind::Colimit {
            push_checked(
                ConstructStep::IntroduceColimitVertex {
                    vertex: cond.apex.clone(),
                    condition: i,
                },
                &mut out,
            );
        }
    }

    induced_candidates(state, b, ConvergenceKind::Limit, &mut out);
    induced_candidates(state, b, ConvergenceKind::Colimit, &mut out);
    out
}

/// Enumerate induced-arrow candidates for one orientation, validating
/// each through [`apply_step`].
fn induced_candidates(
    state: &SubsketchState,
    b: &Sketch,
    kind: ConvergenceKind,
    out: &mut Vec<ConstructStep>,
) {
    for (ci, cond) in b.convergences.iter().enumerate() {
        if cond.kind != kind || !state.convergences.contains(&ci) {
            continue;
        }
        for e in &b.graph.edges {
            if state.edges.contains(&e.name) {
                continue;
            }
            let x = match kind {
                ConvergenceKind::Limit => {
                    if e.target != cond.apex {
                        continue;
                    }
                    &e.source
                }
                ConvergenceKind::Colimit => {
                    if e.source != cond.apex {
                        continue;
                    }
                    &e.target
                }
            };
            if !state.vertices.contains(x) {
                continue;
            }
            // Candidate family arrows per shape vertex, in declaration
            // order of the ambient edges.
            let mut slots: Vec<(&String, Vec<&str>)> = Vec::new();
            let mut feasible = true;
            for h in &cond.shape.vertices {
                let d_h = match cond.diagram.vertex(h) {
                    Some(d) => d,
                    None => {
                        feasible = false;
                        break;
                    }
                };
                let cands: Vec<&str> = b
                    .graph
                    .edges
                    .iter()
                    .filter(|xe| {
                        state.edges.contains(&xe.name)
                            && match kind {
                                ConvergenceKind::Limit => {
                                    xe.source == *x && xe.target == d_h
                                }
                                ConvergenceKind::Colimit => {
                                    xe.source == d_h && xe.target == *x
                                }
                            }
                    })
                    .map(|xe| xe.name.as_str())
                    .collect();
                if cands.is_empty() {
                    feasible = false;
                    break;
                }
                slots.push((h, cands));
            }
            if !feasible {
                continue;
            }
            let mut idx = vec![0usize; slots.len()];
            loop {
                let family: BTreeMap<String, String> = slots
                    .iter()
                    .zip(&idx)
                    .map(|((h, cands), i)| ((*h).clone(), cands[*i].to_string()))
                    .collect();
                if let Some(step) =
                    induced_step_for_family(state, b, ci, &e.name, &family, kind)
                {
                    if apply_step(state, b, &step).is_ok() {
                        out.push(step);
                    }
                }
                let mut k = slots.len();
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < slots[k].1.len() {
                        break;
                    }
                    idx[k] = 0;
                }
                if idx.iter().all(|i| *i == 0) {
                    break;
                }
            }
        }
    }
}

/// Resolve premise and conclusion condition indices for a family, taking
/// the first structural match in each case.
fn induced_step_for_family(
    state: &SubsketchState,
    b: &Sketch,
    ci: usize,
    arrow: &str,
    family: &BTreeMap<String, String>,
    kind: ConvergenceKind,
) -> Option<ConstructStep> {
    let cond = &b.convergences[ci];
    let e = b.graph.edge(arrow)?;
    let x = match kind {
        ConvergenceKind::Limit => e.source.clone(),
        ConvergenceKind::Colimit => e.target.clone(),
    };
    let mut premises = Vec::new();
    for he in &cond.shape.edges {
        let d_he = cond.diagram.edge(&he.name)?;
        let x_src = family.get(&he.source)?;
        let x_tgt = family.get(&he.target)?;
        let (p1, p2) = match kind {
            ConvergenceKind::Limit => (
                Path {
                    start: x.clone(),
                    edges: vec![x_src.clone(), d_he.to_string()],
                },
                Path {
                    start: x.clone(),
                    edges: vec![x_tgt.clone()],
                },
            ),
            ConvergenceKind::Colimit => {
                let d_src = cond.diagram.vertex(&he.source)?;
                (
                    Path {
                        start: d_src.to_string(),
                        edges: vec![d_he.to_string(), x_tgt.clone()],
                    },
                    Path {
                        start: d_src.to_string(),
                        edges: vec![x_src.clone()],
                    },
                )
            }
        };
        let pi = (0..b.commutativities.len()).find(|i| {
            state.commutativities.contains(i) && matches_pair(&b.commutativities[*i], &p1, &p2)
        })?;
        premises.push(pi);
    }
    let mut conclusions = Vec::new();
    for h in &cond.shape.vertices {
        let leg = cond.legs.get(h)?;
        let x_h = family.get(h)?;
        let (p1, p2) = match kind {
            ConvergenceKind::Limit => (
                Path {
                    start: x.clone(),
                    edges: vec![arrow.to_string(), leg.clone()],
                },
                Path {
                    start: x.clone(),
                    edges: vec![x_h.clone()],
                },
            ),
            ConvergenceKind::Colimit => {
                let d_h = cond.diagram.vertex(h)?;
                (
                    Path {
                        start: d_h.to_string(),
                        edges: vec![leg.clone(), arrow.to_string()],
                    },
                    Path {
                        start: d_h.to_string(),
                        edges: vec![x_h.clone()],
                    },
                )
            }
        };
        let qi = (0..b.commutativities.len())
            .find(|i| matches_pair(&b.commutativities[*i], &p1, &p2))?;
        conclusions.push(qi);
    }
    Some(match kind {
        ConvergenceKind::Limit => ConstructStep::IncludeInducedIntoLimit {
            arrow: arrow.to_string(),
            condition: ci,
            family: family.clone(),
            premises,
            conclusions,
        },
        ConvergenceKind::Colimit => ConstructStep::IncludeInducedOutOfColimit {
            arrow: arrow.to_string(),
            condition: ci,
            family: family.clone(),
            premises,
            conclusions,
        },
    })
}

/// What was missing from the ambient sketch at a dead end.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Frontier {
    pub missing_vertices: Vec<String>,
    pub missing_edges: Vec<String>,
    pub missing_commutativities: Vec<String>,
    pub missing_convergences: Vec<String>,
}

fn frontier_of(state: &SubsketchState, b: &Sketch) -> Frontier {
    Frontier {
        missing_vertices: b
            .graph
            .vertices
            .iter()
            .filter(|v| !state.vertices.contains(*v))
            .cloned()
            .collect(),
        missing_edges: b
            .graph
            .edges
            .iter()
            .filter(|e| !state.edges.contains(&e.name))
            .map(|e| e.name.clone())
            .collect(),
        missing_commutativities: b
            .commutativities
            .iter()
            .enumerate()
            .filter(|(i, _)| !state.commutativities.contains(i))
            .map(|(_, c)| c.to_string())
            .collect(),
        missing_convergences: b
            .convergences
            .iter()
            .enumerate()
            .filter(|(i, _)| !state.convergences.contains(i))
            .map(|(_, c)| c.to_string())
            .collect(),
    }
}

/// A refusal: no derivation exists; the frontiers list each distinct dead
/// end the exhausted search reached.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Refusal {
    pub frontiers: Vec<Frontier>,
}

/// Outcome of the certificate search: a certificate or a definite
/// refusal. Exceeding the search budget is an error, not a refusal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyOutcome {
    Certified(ConstructibilityCertificate),
    Refused(Refusal),
}

struct SearchCtx<'b> {
    b: &'b Sketch,
    memo: BTreeSet<SubsketchState>,
    frontier_set: BTreeSet<Frontier>,
    frontiers: Vec<Frontier>,
    nodes: u64,
    max_nodes: u64,
}

/// Apply every applicable non-vertex-introducing step until none is left.
/// Those steps only grow the state and never disable one another or an
/// apex introduction, so the fixpoint is order-independent; taking the
/// first applicable step each round makes the recorded sequence
/// canonical.
fn saturate(mut state: SubsketchState, b: &Sketch) -> (SubsketchState, Vec<ConstructStep>) {
    let mut steps = Vec::new();
    loop {
        let step = applicable_steps(&state, b)
            .into_iter()
            .find(|s| !s.introduces_vertex());
        match step {
            Some(s) => {
                state = apply_step(&state, b, &s).expect("applicable step applies");
                steps.push(s);
            }
            None => return (state, steps),
        }
    }
}

fn dfs(
    state: SubsketchState,
    ctx: &mut SearchCtx,
) -> Result<Option<Vec<ConstructStep>>, Error> {
    ctx.nodes += 1;
    if ctx.nodes > ctx.max_nodes {
        return Err(Error::BudgetExceeded {
            bound: format!("{} saturated states", ctx.nodes),
            max: ctx.max_nodes,
            context: "constructibility search".to_string(),
        });
    }
    let (state, steps) = saturate(state, ctx.b);
    if state.is_complete(ctx.b) {
        return Ok(Some(steps));
    }
    if !ctx.memo.insert(state.clone()) {
        return Ok(None);
    }
    let branches: Vec<ConstructStep> = applicable_steps(&state, ctx.b)
        .into_iter()
        .filter(|s| s.introduces_vertex())
        .collect();
    if branches.is_empty() {
        let frontier = frontier_of(&state, ctx.b);
        if ctx.frontier_set.insert(frontier.clone()) {
            ctx.frontiers.push(frontier);
        }
        return Ok(None);
    }
    for branch in branches {
        let next = apply_step(&state, ctx.b, &branch).expect("applicable step applies");
        if let Some(rest) = dfs(next, ctx)? {
            let mut all = steps;
            all.push(branch);
            all.extend(rest);
            return Ok(Some(all));
        }
    }
    Ok(None)
}

/// Search for a derivation of `b` from the subsketch `a`.
///
/// Saturating steps are taken greedily; the search branches (and
/// memoizes) only over apex introductions, which are the only steps that
/// consume a "not yet present" guard. The first derivation found in
/// canonical order is returned, so certificates are deterministic.
pub fn certify_constructible(
    a: &Sketch,
    b: &Sketch,
    budget: SearchBudget,
) -> Result<CertifyOutcome, Error> {
    if !is_subsketch_inclusion(a, b) {
        return Err(Error::Precondition(
            "the first sketch is not a subsketch of the second".to_string(),
        ));
    }
    let start = state_from_subsketch(a, b)?;
    let mut ctx = SearchCtx {
        b,
        memo: BTreeSet::new(),
        frontier_set: BTreeSet::new(),
        frontiers: Vec::new(),
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    match dfs(start, &mut ctx)? {
        Some(steps) => Ok(CertifyOutcome::Certified(ConstructibilityCertificate {
            steps,
        })),
        None => Ok(CertifyOutcome::Refused(Refusal {
            frontiers: ctx.frontiers,
        })),
    }
}

/// Re-run a certificate against the pair of sketches: every step must be
/// legal in sequence and the final state must be all of `b`.
pub fn replay_certificate(
    cert: &ConstructibilityCertificate,
    a: &Sketch,
    b: &Sketch,
) -> bool {
    if !is_subsketch_inclusion(a, b) {
        return false;
    }
    let mut state = match state_from_subsketch(a, b) {
        Ok(s) => s,
        Err(_) => return false,
    };
    for step in &cert.steps {
        state = match apply_step(&state, b, step) {
            Ok(s) => s,
            Err(_) => return false,
        };
    }
    state.is_complete(b)
}

/// The dual certificate: apex introductions and induced arrows swap
/// orientation; indices are unchanged because dualizing a sketch
/// preserves the order of its condition lists.
pub fn dualize_certificate(cert: &ConstructibilityCertificate) -> ConstructibilityCertificate {
    let steps = cert
        .steps
        .iter()
        .map(|s| match s.clone() {
            ConstructStep::IntroduceLimitVertex { vertex, condition } => {
                ConstructStep::IntroduceColimitVertex { vertex, condition }
            }
            ConstructStep::IntroduceColimitVertex { vertex, condition } => {
                ConstructStep::IntroduceLimitVertex { vertex, condition }
            }
            ConstructStep::IncludeInducedIntoLimit {
                arrow,
                condition,
                family,
                premises,
                conclusions,
            } => ConstructStep::IncludeInducedOutOfColimit {
                arrow,
                condition,
                family,
                premises,
                conclusions,
            },
            ConstructStep::IncludeInducedOutOfColimit {
                arrow,
                condition,
                family,
                premises,
                conclusions,
            } => ConstructStep::IncludeInducedIntoLimit {
                arrow,
                condition,
                family,
                premises,
                conclusions,
            },
            other => other,
        })
        .collect();
    ConstructibilityCertificate { steps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{dualize_sketch, Edge};
    use crate::testutil::*;

    #[test]
    fn mono_pair_has_exactly_the_condition_inclusion() {
        let a = sketch_arrow();
        let b = sketch_mono();
        let state = state_from_subsketch(&a, &b).unwrap();
        let steps = applicable_steps(&state, &b);
        assert_eq!(
            steps,
            vec![ConstructStep::IncludeCondition {
                condition: ConditionRef::Convergence(0)
            }]
        );
    }

    #[test]
    fn complete_state_has_no_applicable_steps() {
        let b = sketch_mono();
        let state = state_from_subsketch(&b, &b).unwrap();
        assert!(state.is_complete(&b));
        assert!(applicable_steps(&state, &b).is_empty());
    }

    #[test]
    fn product_pair_has_exactly_the_apex_introduction() {
        let a = sketch_discrete2();
        let b = sketch_product();
        let state = state_from_subsketch(&a, &b).unwrap();
        let steps = applicable_steps(&state, &b);
        assert_eq!(
            steps,
            vec![ConstructStep::IntroduceLimitVertex {
                vertex: "P".to_string(),
                condition: 0
            }]
        );
    }

    #[test]
    fn certify_single_step_pairs() {
        let budget = SearchBudget::default();
        for (a, b) in [
            (sketch_arrow(), sketch_mono()),
            (sketch_arrow(), sketch_iso()),
            (sketch_discrete2(), sketch_product()),
        ] {
            match certify_constructible(&a, &b, budget).unwrap() {
                CertifyOutcome::Certified(cert) => {
                    assert_eq!(cert.steps.len(), 1);
                    assert!(replay_certificate(&cert, &a, &b));
                }
                CertifyOutcome::Refused(r) => panic!("unexpected refusal: {r:?}"),
            }
        }
    }

    #[test]
    fn certify_the_reflexivity_pair_via_the_equalizer() {
        let a = sketch_relation();
        let b = sketch_refl2();
        let cert = match certify_constructible(&a, &b, SearchBudget::default()).unwrap() {
            CertifyOutcome::Certified(cert) => cert,
            CertifyOutcome::Refused(r) => panic!("unexpected refusal: {r:?}"),
        };
        assert_eq!(
            cert.steps,
            vec![
                ConstructStep::IntroduceLimitVertex {
                    vertex: "L".to_string(),
                    condition: 1
                },
                ConstructStep::IncludeCondition {
                    condition: ConditionRef::Convergence(2)
                },
            ]
        );
        assert!(replay_certificate(&cert, &a, &b));
    }

    #[test]
    fn refuse_the_diagonal_arrow_encoding() {
        let a = sketch_relation();
        let b = sketch_refl1();
        match certify_constructible(&a, &b, SearchBudget::default()).unwrap() {
            CertifyOutcome::Refused(r) => {
                assert_eq!(r.frontiers.len(), 1);
                assert_eq!(r.frontiers[0].missing_edges, vec!["e".to_string()]);
                assert_eq!(r.frontiers[0].missing_commutativities.len(), 2);
            }
            CertifyOutcome::Certified(c) => panic!("unexpected certificate: {c:?}"),
        }
    }

    #[test]
    fn refuse_the_split_epi_pair() {
        let a = sketch_epi();
        let b = sketch_split_epi();
        match certify_constructible(&a, &b, SearchBudget::default()).unwrap() {
            CertifyOutcome::Refused(r) => {
                assert!(r.frontiers[0].missing_edges.contains(&"s".to_string()));
            }
            CertifyOutcome::Certified(c) => panic!("unexpected certificate: {c:?}"),
        }
    }

    #[test]
    fn defined_arrow_steps_fire_on_identity_style_conditions() {
        // One vertex; the loop `e` is defined to be the empty composite.
        let a = Sketch {
            graph: graph(&["A"], &[]),
            ..Default::default()
        };
        let b = Sketch {
            graph: graph(&["A"], &[("e", "A", "A")]),
            commutativities: vec![commute(path("A", &["e"]), Path::identity("A"))],
            convergences: vec![],
        };
        let cert = match certify_constructible(&a, &b, SearchBudget::default()).unwrap() {
            CertifyOutcome::Certified(cert) => cert,
            CertifyOutcome::Refused(r) => panic!("unexpected refusal: {r:?}"),
        };
        assert_eq!(
            cert.steps,
            vec![ConstructStep::IncludeDefinedArrow {
                arrow: "e".to_string(),
                condition: 0
            }]
        );
        assert!(replay_certificate(&cert, &a, &b));
    }

    /// A limit apex with a single projection plus an arrow into it induced
    /// by the identity: exercises the induced-into-limit step.
    fn induced_pair() -> (Sketch, Sketch) {
        let a = Sketch {
            graph: graph(&["X"], &[("idX", "X", "X")]),
            commutativities: vec![commute(path("X", &["idX"]), Path::identity("X"))],
            convergences: vec![],
        };
        let mut b = a.clone();
        b.graph.vertices.push("P".to_string());
        b.graph.edges.push(Edge::new("p", "P", "X"));
        b.graph.edges.push(Edge::new("d", "X", "P"));
        b.convergences.push(conv(
            ConvergenceKind::Limit,
            "P",
            graph(&["W1"], &[]),
            &[("W1", "X")],
            &[],
            &[("W1", "p")],
        ));
        b.commutativities.push(commute(
            path("X", &["d", "p"]),
            path("X", &["idX"]),
        ));
        (a, b)
    }

    #[test]
    fn certify_an_induced_arrow_into_a_limit() {
        let (a, b) = induced_pair();
        let cert = match certify_constructible(&a, &b, SearchBudget::default()).unwrap() {
            CertifyOutcome::Certified(cert) => cert,
            CertifyOutcome::Refused(r) => panic!("unexpected refusal: {r:?}"),
        };
        assert_eq!(
            cert.steps,
            vec![
                ConstructStep::IntroduceLimitVertex {
                    vertex: "P".to_string(),
                    condition: 0
                },
                ConstructStep::IncludeInducedIntoLimit {
                    arrow: "d".to_string(),
                    condition: 0,
                    family: btree(&[("W1", "idX")]),
                    premises: vec![],
                    conclusions: vec![1],
                },
            ]
        );
        assert!(replay_certificate(&cert, &a, &b));
    }

    #[test]
    fn dual_certificates_replay_on_dual_pairs() {
        let budget = SearchBudget::default();
        for (a, b) in [
            (sketch_arrow(), sketch_mono()),
            (sketch_discrete2(), sketch_product()),
            (sketch_relation(), sketch_refl2()),
            (induced_pair().0, induced_pair().1),
        ] {
            let cert = match certify_constructible(&a, &b, budget).unwrap() {
                CertifyOutcome::Certified(cert) => cert,
                CertifyOutcome::Refused(r) => panic!("unexpected refusal: {r:?}"),
            };
            let da = dualize_sketch(&a);
            let db = dualize_sketch(&b);
            let dual_cert = dualize_certificate(&cert);
            assert!(replay_certificate(&dual_cert, &da, &db));
            assert_eq!(dualize_certificate(&dual_cert), cert);
            // The dual pair certifies directly as well.
            match certify_constructible(&da, &db, budget).unwrap() {
                CertifyOutcome::Certified(direct) => {
                    assert!(replay_certificate(&direct, &da, &db))
                }
                CertifyOutcome::Refused(r) => panic!("dual refusal: {r:?}"),
            }
        }
    }

    #[test]
    fn replay_rejects_tampered_certificates() {
        let a = sketch_arrow();
        let b = sketch_mono();
        let cert = match certify_constructible(&a, &b, SearchBudget::default()).unwrap() {
            CertifyOutcome::Certified(cert) => cert,
            _ => unreachable!(),
        };
        assert!(replay_certificate(&cert, &a, &b));

        // Dropping the step leaves the state incomplete.
        let empty = ConstructibilityCertificate::default();
        assert!(!replay_certificate(&empty, &a, &b));
        // Repeating the step is illegal the second time.
        let mut doubled = cert.clone();
        doubled.steps.extend(cert.steps.clone());
        assert!(!replay_certificate(&doubled, &a, &b));
        // A certificate replayed against the wrong pair fails: the
        // product condition's items are absent from the discrete start.
        assert!(!replay_certificate(
            &cert,
            &sketch_discrete2(),
            &sketch_product()
        ));
        // Introducing an apex that is already present is illegal.
        let bad = ConstructibilityCertificate {
            steps: vec![ConstructStep::IntroduceLimitVertex {
                vertex: "A".to_string(),
                condition: 0,
            }],
        };
        assert!(!replay_certificate(&bad, &a, &b));
    }

    #[test]
    fn search_budget_is_a_hard_error() {
        let a = sketch_relation();
        let b = sketch_refl2();
        match certify_constructible(&a, &b, SearchBudget::new(0)) {
            Err(Error::BudgetExceeded { max, .. }) => assert_eq!(max, 0),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn certificates_are_deterministic() {
        let a = sketch_relation();
        let b = sketch_refl2();
        let first = certify_constructible(&a, &b, SearchBudget::default()).unwrap();
        let second = certify_constructible(&a, &b, SearchBudget::default()).unwrap();
        match (first, second) {
            (CertifyOutcome::Certified(c1), CertifyOutcome::Certified(c2)) => {
                assert_eq!(c1, c2)
            }
            other => panic!("expected two certificates, got {other:?}"),
        }
    }
}
