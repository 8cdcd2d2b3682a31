//! Exactness sequents and their verification deciders.
//!
//! A sequent is a pair of nested subsketch inclusions `x ⊆ a ⊆ b`. Fixing
//! a structure `F` of `x` in a finite category, the structures of `a`
//! extending `F` form the base fibre and the structures of `b` extending
//! `F` form the total fibre; restriction along `β : a -> b` maps the
//! second onto the first.
//!
//! Three notions of the sequent holding at `F` are decided here, in
//! increasing strength of the witness:
//! - [`exists_verification`]: every base structure extends strictly;
//! - [`exists_verification_upto_iso`]: every base structure is isomorphic
//!   (over `F`) to a restricted one;
//! - [`exists_functorial_verification`]: the extension can be chosen
//!   functorially in morphisms over `F`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::construct::{self, CertifyOutcome, SearchBudget};
use crate::error::{Error, ValidationReport};
use crate::fincat::{extract_category, FiniteCategory};
use crate::kernel::{
    conditions_equivalent, dualize_sketch, is_subsketch_inclusion, validate_sketch, GraphMorphism,
    Sketch, SketchMorphism,
};
use crate::models::{
    enumerate_transformations, fibre, identity_transformation, is_iso_transformation, is_natural,
    restrict_structure, NatTransformation, Structure,
};
use crate::Budget;

/// Cap on candidate sections tried by the brute-force functorial search.
pub const DEFAULT_SECTION_CAP: u64 = 100_000;

/// Nested subsketch inclusions `x ⊆ a ⊆ b`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExactnessSequent {
    pub name: String,
    pub x: Sketch,
    pub a: Sketch,
    pub b: Sketch,
}

impl ExactnessSequent {
    /// The inclusion `x ↪ a` (identity on names).
    pub fn alpha(&self) -> SketchMorphism {
        GraphMorphism::inclusion_of(&self.x.graph)
    }

    /// The inclusion `a ↪ b` (identity on names).
    pub fn beta(&self) -> SketchMorphism {
        GraphMorphism::inclusion_of(&self.a.graph)
    }

    /// The composite inclusion `x ↪ b`.
    pub fn alpha_beta(&self) -> SketchMorphism {
        GraphMorphism::inclusion_of(&self.x.graph)
    }
}

/// All three sketches valid and literally nested.
pub fn validate_sequent(seq: &ExactnessSequent) -> ValidationReport {
    let mut report = ValidationReport::valid();
    report.absorb("x/", validate_sketch(&seq.x));
    report.absorb("a/", validate_sketch(&seq.a));
    report.absorb("b/", validate_sketch(&seq.b));
    if !report.is_valid() {
        return report;
    }
    if !is_subsketch_inclusion(&seq.x, &seq.a) {
        report.push("x -> a", "not a subsketch inclusion");
    }
    if !is_subsketch_inclusion(&seq.a, &seq.b) {
        report.push("a -> b", "not a subsketch inclusion");
    }
    report
}

/// Dualize all three sketches; the sequent's verdicts are invariant under
/// this together with dualizing the category and the structure.
pub fn dualize_sequent(seq: &ExactnessSequent) -> ExactnessSequent {
    ExactnessSequent {
        name: seq.name.clone(),
        x: dualize_sketch(&seq.x),
        a: dualize_sketch(&seq.a),
        b: dualize_sketch(&seq.b),
    }
}

/// Is the inner inclusion unconditional of finite kind: is `a` the
/// underlying sketch of a finite category carrying, beyond the category
/// structure itself, only conditions that already appear in `x`?
pub fn is_unconditional_finite_kind(seq: &ExactnessSequent) -> bool {
    let ex = match extract_category(&seq.a) {
        Ok(ex) => ex,
        Err(_) => return false,
    };
    ex.residue
        .iter()
        .all(|c| seq.x.commutativities.contains(c))
        && seq
            .a
            .convergences
            .iter()
            .all(|c| seq.x.convergences.iter().any(|d| conditions_equivalent(c, d)))
}

/// One extension chosen for one base structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessPair {
    pub base: Structure,
    pub extension: Structure,
}

/// Outcome of a verification decision: either every base structure has an
/// extension (with one canonical witness per base), or a base structure
/// without one. A negative outcome with no counterexample means the bases
/// all extend individually but no functorial choice exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationDecision {
    pub holds: bool,
    pub witnesses: Vec<WitnessPair>,
    pub counterexample: Option<Structure>,
}

impl VerificationDecision {
    fn positive(witnesses: Vec<WitnessPair>) -> Self {
        VerificationDecision {
            holds: true,
            witnesses,
            counterexample: None,
        }
    }

    fn negative(counterexample: Option<Structure>) -> Self {
        VerificationDecision {
            holds: false,
            witnesses: Vec::new(),
            counterexample,
        }
    }
}

/// Does every structure of `a` extending `f` extend on to `b`, strictly?
///
/// The witness for each base structure is the first extension in
/// canonical enumeration order; the counterexample, if any, is the first
/// base structure (in canonical order) whose fibre is empty.
pub fn exists_verification(
    seq: &ExactnessSequent,
    f: &Structure,
    c: &FiniteCategory,
    budget: Budget,
) -> Result<VerificationDecision, Error> {
    let alpha = seq.alpha();
    let beta = seq.beta();
    let bases = fibre(&alpha, &seq.x, &seq.a, c, f, budget)?;
    let mut witnesses = Vec::new();
    for g in bases {
        let extensions = fibre(&beta, &seq.a, &seq.b, c, &g, budget)?;
        match extensions.into_iter().next() {
            Some(h) => witnesses.push(WitnessPair {
                base: g,
                extension: h,
            }),
            None => return Ok(VerificationDecision::negative(Some(g))),
        }
    }
    Ok(VerificationDecision::positive(witnesses))
}

/// Is the component at every `x`-vertex the identity? Morphisms of fibre
/// categories must fix the shared restriction.
fn fixes_base(
    n: &NatTransformation,
    x: &Sketch,
    c: &FiniteCategory,
) -> bool {
    x.graph.vertices.iter().all(|v| {
        match (n.component(v), n.source.vertex(v).and_then(|o| c.identity_of(o))) {
            (Some(comp), Some(id)) => comp == id,
            _ => false,
        }
    })
}

/// Does every structure of `a` extending `f` become, up to isomorphism
/// over `f`, the restriction of a structure of `b` extending `f`?
pub fn exists_verification_upto_iso(
    seq: &ExactnessSequent,
    f: &Structure,
    c: &FiniteCategory,
    budget: Budget,
) -> Result<VerificationDecision, Error> {
    let alpha = seq.alpha();
    let beta = seq.beta();
    let bases = fibre(&alpha, &seq.x, &seq.a, c, f, budget)?;
    let totals = fibre(&seq.alpha_beta(), &seq.x, &seq.b, c, f, budget)?;
    let restricted: Vec<Structure> = totals
        .iter()
        .map(|h| restrict_structure(h, &beta))
        .collect::<Result<_, _>>()?;
    let mut witnesses = Vec::new();
    'bases: for g in bases {
        for (h, hb) in totals.iter().zip(&restricted) {
            let isos = enumerate_transformations(hb, &g, &seq.a, c, budget)?;
            if isos
                .iter()
                .any(|n| fixes_base(n, &seq.x, c) && is_iso_transformation(n, c))
            {
                witnesses.push(WitnessPair {
                    base: g,
                    extension: h.clone(),
                });
                continue 'bases;
            }
        }
        return Ok(VerificationDecision::negative(Some(g)));
    }
    Ok(VerificationDecision::positive(witnesses))
}

/// A morphism of the base fibre category: a transformation between two
/// enumerated base structures fixing `f`.
struct FibreMorphism {
    src: usize,
    tgt: usize,
    components: BTreeMap<String, String>,
}

/// Natural transformations `h1 -> h2` over `dst` whose components at the
/// keys of `pinned` are exactly the pinned arrows; only the remaining
/// vertices are enumerated.
fn transformations_with_pinned(
    h1: &Structure,
    h2: &Structure,
    dst: &Sketch,
    c: &FiniteCategory,
    pinned: &BTreeMap<String, String>,
) -> Vec<NatTransformation> {
    let mut slots: Vec<(String, Vec<String>)> = Vec::new();
    for v in &dst.graph.vertices {
        if pinned.contains_key(v) {
            continue;
        }
        let (src, tgt) = match (h1.vertex(v), h2.vertex(v)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Vec::new(),
        };
        let homs: Vec<String> = c.hom(src, tgt).into_iter().map(|a| a.name.clone()).collect();
        if homs.is_empty() {
            return Vec::new();
        }
        slots.push((v.clone(), homs));
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; slots.len()];
    loop {
        let mut components = pinned.clone();
        for ((v, homs), i) in slots.iter().zip(&idx) {
            components.insert(v.clone(), homs[*i].clone());
        }
        let n = NatTransformation {
            source: h1.clone(),
            target: h2.clone(),
            components,
        };
        if is_natural(&n, dst, c) {
            out.push(n);
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
    out
}

/// Brute-force functorial decision: enumerate object sections under the
/// cap, then try to extend each section to a functor by assigning an
/// image to every base-fibre morphism, backtracking on the functor laws.
pub fn exists_functorial_verification_generic(
    seq: &ExactnessSequent,
    f: &Structure,
    c: &FiniteCategory,
    budget: Budget,
    cap: u64,
) -> Result<VerificationDecision, Error> {
    let alpha = seq.alpha();
    let beta = seq.beta();
    let bases = fibre(&alpha, &seq.x, &seq.a, c, f, budget)?;
    let mut fibres: Vec<Vec<Structure>> = Vec::new();
    for g in &bases {
        let exts = fibre(&beta, &seq.a, &seq.b, c, g, budget)?;
        if exts.is_empty() {
            return Ok(VerificationDecision::negative(Some(g.clone())));
        }
        fibres.push(exts);
    }
    if bases.is_empty() {
        return Ok(VerificationDecision::positive(Vec::new()));
    }

    // Morphisms of the base fibre category, in canonical order.
    let mut morphisms: Vec<FibreMorphism> = Vec::new();
    for (i, g1) in bases.iter().enumerate() {
        for (j, g2) in bases.iter().enumerate() {
            for n in enumerate_transformations(g1, g2, &seq.a, c, budget)? {
                if fixes_base(&n, &seq.x, c) {
                    morphisms.push(FibreMorphism {
                        src: i,
                        tgt: j,
                        components: n.components,
                    });
                }
            }
        }
    }
    let identity_index: Vec<usize> = bases
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let id = identity_transformation(g, &seq.a, c);
            morphisms
                .iter()
                .position(|m| m.src == i && m.tgt == i && m.components == id.components)
                .expect("identity transformation is enumerated")
        })
        .collect();
    // Composition table of the base fibre category: (later, earlier) -> composite.
    let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (k1, m1) in morphisms.iter().enumerate() {
        for (k2, m2) in morphisms.iter().enumerate() {
            if m1.tgt != m2.src {
                continue;
            }
            let composed: Option<BTreeMap<String, String>> = m1
                .components
                .iter()
                .map(|(v, a)| {
                    let b = m2.components.get(v)?;
                    Some((v.clone(), c.compose(b, a)?.to_string()))
                })
                .collect();
            let composed = composed.expect("fibre morphisms compose");
            let k3 = morphisms
                .iter()
                .position(|m| m.src == m1.src && m.tgt == m2.tgt && m.components == composed)
                .expect("fibre category is closed under composition");
            table.insert((k2, k1), k3);
        }
    }

    // Odometer over object sections, bounded by the cap.
    let mut section_idx = vec![0usize; bases.len()];
    let mut tried = 0u64;
    loop {
        tried += 1;
        if tried > cap {
            return Err(Error::CapExceeded {
                cap,
                context: "functorial verification section search".to_string(),
            });
        }
        let section: Vec<&Structure> = fibres
            .iter()
            .zip(&section_idx)
            .map(|(fs, i)| &fs[*i])
            .collect();
        if functor_extends(seq, c, &section, &morphisms, &identity_index, &table) {
            let witnesses = bases
                .iter()
                .zip(&section)
                .map(|(g, h)| WitnessPair {
                    base: g.clone(),
                    extension: (*h).clone(),
                })
                .collect();
            return Ok(VerificationDecision::positive(witnesses));
        }
        let mut k = section_idx.len();
        loop {
            if k == 0 {
                return Ok(VerificationDecision::negative(None));
            }
            k -= 1;
            section_idx[k] += 1;
            if section_idx[k] < fibres[k].len() {
                break;
            }
            section_idx[k] = 0;
        }
        if section_idx.iter().all(|i| *i == 0) {
            return Ok(VerificationDecision::negative(None));
        }
    }
}

/// Can every base-fibre morphism be assigned an extension morphism between
/// the chosen extensions so that identities and composites line up?
fn functor_extends(
    seq: &ExactnessSequent,
    c: &FiniteCategory,
    section: &[&Structure],
    morphisms: &[FibreMorphism],
    identity_index: &[usize],
    table: &BTreeMap<(usize, usize), usize>,
) -> bool {
    // Candidate images per morphism. Identities are forced to identities.
    let mut candidates: Vec<Vec<NatTransformation>> = Vec::with_capacity(morphisms.len());
    for (k, m) in morphisms.iter().enumerate() {
        if identity_index[m.src] == k {
            candidates.push(vec![identity_transformation(section[m.src], &seq.b, c)]);
            continue;
        }
        let cands = transformations_with_pinned(
            section[m.src],
            section[m.tgt],
            &seq.b,
            c,
            &m.components,
        );
        if cands.is_empty() {
            return false;
        }
        candidates.push(cands);
    }

    fn consistent(
        chosen: &[Option<usize>],
        candidates: &[Vec<NatTransformation>],
        table: &BTreeMap<(usize, usize), usize>,
        c: &FiniteCategory,
        just_set: usize,
    ) -> bool {
        for ((k2, k1), k3) in table {
            if *k2 != just_set && *k1 != just_set && *k3 != just_set {
                continue;
            }
            let (c1, c2, c3) = match (chosen[*k1], chosen[*k2], chosen[*k3]) {
                (Some(a), Some(b), Some(d)) => (a, b, d),
                _ => continue,
            };
            let n1 = &candidates[*k1][c1];
            let n2 = &candidates[*k2][c2];
            let n3 = &candidates[*k3][c3];
            for (v, a) in &n1.components {
                let b = match n2.component(v) {
                    Some(b) => b,
                    None => return false,
                };
                if c.compose(b, a) != n3.component(v) {
                    return false;
                }
            }
        }
        true
    }

    fn assign(
        k: usize,
        chosen: &mut Vec<Option<usize>>,
        candidates: &[Vec<NatTransformation>],
        table: &BTreeMap<(usize, usize), usize>,
        c: &FiniteCategory,
    ) -> bool {
        if k == candidates.len() {
            return true;
        }
        for i in 0..candidates[k].len() {
            chosen[k] = Some(i);
            if consistent(chosen, candidates, table, c, k)
                && assign(k + 1, chosen, candidates, table, c)
            {
                return true;
            }
            chosen[k] = None;
        }
        false
    }

    let mut chosen: Vec<Option<usize>> = vec![None; morphisms.len()];
    assign(0, &mut chosen, &candidates, table, c)
}

/// Decide functorial verification, delegating to the strict decider when
/// the outer inclusion is constructible (the two notions then agree and
/// the strict decision is far cheaper). Falls back to the brute-force
/// search when constructibility is refused or its search runs out of
/// budget.
pub fn exists_functorial_verification(
    seq: &ExactnessSequent,
    f: &Structure,
    c: &FiniteCategory,
    budget: Budget,
    cap: u64,
) -> Result<VerificationDecision, Error> {
    match construct::certify_constructible(&seq.a, &seq.b, SearchBudget::default()) {
        Ok(CertifyOutcome::Certified(_)) => exists_verification(seq, f, c, budget),
        _ => exists_functorial_verification_generic(seq, f, c, budget, cap),
    }
}
