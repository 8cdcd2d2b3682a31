//! Finite categories presented by explicit composition tables.
//!
//! A [`FiniteCategory`] is a finite graph of objects and arrows together
//! with a chosen identity arrow per object and a total composition table on
//! composable pairs. Everything a decider needs — hom sets, cones, limit
//! and colimit checks, mono/iso tests — is computed by finite enumeration
//! in declaration order, so results are deterministic.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::ValidationReport;
use crate::kernel::{
    CommutativityCondition, ConvergenceKind, Edge, Graph, GraphMorphism, Path, Sketch,
};

/// A finite category: objects, arrows, identities, and a composition table.
///
/// The table maps `(g, f)` to `g ∘ f` (apply `f` first); it must be defined
/// exactly on composable pairs. Declaration order of objects and arrows is
/// significant for enumeration order, never for semantics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiniteCategory {
    pub objects: Vec<String>,
    pub arrows: Vec<Edge>,
    /// Object name -> name of its identity arrow.
    pub identities: BTreeMap<String, String>,
    /// `(g, f) -> g ∘ f` for composable pairs (target of `f` = source of `g`).
    pub composition: BTreeMap<(String, String), String>,
}

impl FiniteCategory {
    pub fn has_object(&self, name: &str) -> bool {
        self.objects.iter().any(|o| o == name)
    }

    pub fn arrow(&self, name: &str) -> Option<&Edge> {
        self.arrows.iter().find(|a| a.name == name)
    }

    pub fn identity_of(&self, object: &str) -> Option<&str> {
        self.identities.get(object).map(|s| s.as_str())
    }

    pub fn is_identity(&self, arrow: &str) -> bool {
        self.identities.values().any(|a| a == arrow)
    }

    /// `g ∘ f` from the table, if the pair is listed.
    pub fn compose(&self, g: &str, f: &str) -> Option<&str> {
        self.composition
            .get(&(g.to_string(), f.to_string()))
            .map(|s| s.as_str())
    }

    /// Arrows from `a` to `b`, in declaration order.
    pub fn hom(&self, a: &str, b: &str) -> Vec<&Edge> {
        self.arrows
            .iter()
            .filter(|e| e.source == a && e.target == b)
            .collect()
    }

    /// Evaluate a path by folding the table; the empty path yields the
    /// identity of its start.
    pub fn compose_path(&self, p: &Path) -> Option<String> {
        if p.edges.is_empty() {
            return self.identity_of(&p.start).map(|s| s.to_string());
        }
        let mut acc = p.edges[0].clone();
        for next in &p.edges[1..] {
            acc = self.compose(next, &acc)?.to_string();
        }
        Some(acc)
    }

    /// The underlying graph (objects as vertices, arrows as edges).
    pub fn graph(&self) -> Graph {
        Graph {
            vertices: self.objects.clone(),
            edges: self.arrows.clone(),
        }
    }

    /// The two-sided inverse of an arrow, if it has one.
    pub fn inverse_of(&self, f: &str) -> Option<&str> {
        let fe = self.arrow(f)?;
        let id_src = self.identity_of(&fe.source)?;
        let id_tgt = self.identity_of(&fe.target)?;
        self.hom(&fe.target, &fe.source)
            .into_iter()
            .map(|g| g.name.as_str())
            .find(|g| self.compose(g, f) == Some(id_src) && self.compose(f, g) == Some(id_tgt))
    }
}

/// Check the category axioms: well-formed graph, identity arrows in place,
/// a composition table defined exactly on composable pairs with correct
/// endpoints, identity laws, and associativity.
pub fn validate_category(c: &FiniteCategory) -> ValidationReport {
    let graph = c.graph();
    let mut report = crate::kernel::validate_graph(&graph);
    if !report.is_valid() {
        return report;
    }

    for o in &c.objects {
        match c.identity_of(o).and_then(|n| c.arrow(n)) {
            None => report.push(format!("object {o}"), "no identity arrow assigned"),
            Some(e) if e.source != *o || e.target != *o => {
                report.push(
                    format!("object {o}"),
                    format!("identity `{}` is not a loop at {o}", e.name),
                );
            }
            Some(_) => {}
        }
    }
    for o in c.identities.keys() {
        if !c.has_object(o) {
            report.push(format!("identity of {o}"), "not a declared object");
        }
    }

    for ((g, f), gf) in &c.composition {
        let (fe, ge, gfe) = match (c.arrow(f), c.arrow(g), c.arrow(gf)) {
            (Some(fe), Some(ge), Some(gfe)) => (fe, ge, gfe),
            _ => {
                report.push(
                    format!("composition ({g}, {f})"),
                    "entry mentions an undeclared arrow",
                );
                continue;
            }
        };
        if fe.target != ge.source {
            report.push(
                format!("composition ({g}, {f})"),
                "pair is not composable",
            );
        } else if gfe.source != fe.source || gfe.target != ge.target {
            report.push(
                format!("composition ({g}, {f})"),
                format!("composite `{gf}` has wrong endpoints"),
            );
        }
    }
    for f in &c.arrows {
        for g in &c.arrows {
            if f.target == g.source && c.compose(&g.name, &f.name).is_none() {
                report.push(
                    format!("composition ({}, {})", g.name, f.name),
                    "composable pair missing from the table",
                );
            }
        }
    }
    if !report.is_valid() {
        return report;
    }

    for f in &c.arrows {
        let id_s = c.identity_of(&f.source).expect("checked above");
        let id_t = c.identity_of(&f.target).expect("checked above");
        if c.compose(&f.name, id_s) != Some(&f.name) {
            report.push(
                format!("arrow {}", f.name),
                "right identity law fails",
            );
        }
        if c.compose(id_t, &f.name) != Some(&f.name) {
            report.push(format!("arrow {}", f.name), "left identity law fails");
        }
    }

    for f in &c.arrows {
        for g in &c.arrows {
            if f.target != g.source {
                continue;
            }
            for h in &c.arrows {
                if g.target != h.source {
                    continue;
                }
                let gf = c.compose(&g.name, &f.name).expect("total");
                let hg = c.compose(&h.name, &g.name).expect("total");
                if c.compose(&h.name, gf) != c.compose(hg, &f.name) {
                    report.push(
                        format!("arrows ({}, {}, {})", f.name, g.name, h.name),
                        "associativity fails",
                    );
                }
            }
        }
    }

    report
}

/// The underlying sketch of a category: its graph, one identity condition
/// per object, and one composite condition per composable pair of arrows.
pub fn underlying_sketch(c: &FiniteCategory) -> Sketch {
    let mut commutativities = Vec::new();
    for o in &c.objects {
        if let Some(id) = c.identity_of(o) {
            commutativities.push(CommutativityCondition {
                lhs: Path {
                    start: o.clone(),
                    edges: vec![id.to_string()],
                },
                rhs: Path::identity(o.clone()),
            });
        }
    }
    for f in &c.arrows {
        for g in &c.arrows {
            if f.target != g.source {
                continue;
            }
            if let Some(gf) = c.compose(&g.name, &f.name) {
                commutativities.push(CommutativityCondition {
                    lhs: Path {
                        start: f.source.clone(),
                        edges: vec![f.name.clone(), g.name.clone()],
                    },
                    rhs: Path {
                        start: f.source.clone(),
                        edges: vec![gf.to_string()],
                    },
                });
            }
        }
    }
    Sketch {
        graph: c.graph(),
        commutativities,
        convergences: Vec::new(),
    }
}

/// Why a sketch fails to present a finite category.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("vertex `{0}` has no identity condition")]
    MissingIdentity(String),
    #[error("vertices `{0}` carry conflicting identity conditions")]
    AmbiguousIdentity(String),
    #[error("composite of `{f}` then `{g}` is not determined by any condition")]
    MissingComposite { f: String, g: String },
    #[error("composite of `{f}` then `{g}` is determined twice, as `{first}` and `{second}`")]
    ConflictingComposite {
        f: String,
        g: String,
        first: String,
        second: String,
    },
    #[error("the induced table violates the category axioms: {0}")]
    NotACategory(String),
}

/// A category recovered from a sketch, plus the commutativity conditions
/// the category structure does not account for. Convergence conditions are
/// never part of a category presentation, so they are all residual and are
/// left on the sketch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    pub category: FiniteCategory,
    pub residue: Vec<CommutativityCondition>,
}

/// Inverse of [`underlying_sketch`] up to residue: read identity conditions
/// (`[e] = id(v)`) and composite conditions (`[f, g] = [h]`) off the
/// sketch, check they form a category, and return the conditions that were
/// not needed.
pub fn extract_category(s: &Sketch) -> Result<Extraction, ExtractError> {
    let mut identities: BTreeMap<String, String> = BTreeMap::new();
    let mut composition: BTreeMap<(String, String), String> = BTreeMap::new();

    for c in &s.commutativities {
        // Identity form: a single loop edge equal to the empty path.
        let identity_form = |single: &Path, empty: &Path| -> Option<(String, String)> {
            if single.edges.len() == 1 && empty.edges.is_empty() {
                let e = s.graph.edge(&single.edges[0])?;
                if e.source == e.target && e.source == single.start && empty.start == e.source {
                    return Some((e.source.clone(), e.name.clone()));
                }
            }
            None
        };
        if let Some((v, e)) =
            identity_form(&c.lhs, &c.rhs).or_else(|| identity_form(&c.rhs, &c.lhs))
        {
            match identities.get(&v) {
                Some(prev) if *prev != e => return Err(ExtractError::AmbiguousIdentity(v)),
                _ => {
                    identities.insert(v, e);
                }
            }
            continue;
        }
        // Composite form: a two-edge path equal to a one-edge path.
        let composite_form = |two: &Path, one: &Path| -> Option<((String, String), String)> {
            if two.edges.len() == 2 && one.edges.len() == 1 {
                let f = two.edges[0].clone();
                let g = two.edges[1].clone();
                Some(((g, f), one.edges[0].clone()))
            } else {
                None
            }
        };
        if let Some((key, h)) =
            composite_form(&c.lhs, &c.rhs).or_else(|| composite_form(&c.rhs, &c.lhs))
        {
            match composition.get(&key) {
                Some(prev) if *prev != h => {
                    return Err(ExtractError::ConflictingComposite {
                        f: key.1,
                        g: key.0,
                        first: prev.clone(),
                        second: h,
                    })
                }
                _ => {
                    composition.insert(key, h);
                }
            }
        }
        // Anything else is residue; the final membership pass collects it.
    }

    for v in &s.graph.vertices {
        if !identities.contains_key(v) {
            return Err(ExtractError::MissingIdentity(v.clone()));
        }
    }
    for f in &s.graph.edges {
        for g in &s.graph.edges {
            if f.target == g.source && !composition.contains_key(&(g.name.clone(), f.name.clone()))
            {
                return Err(ExtractError::MissingComposite {
                    f: f.name.clone(),
                    g: g.name.clone(),
                });
            }
        }
    }

    let category = FiniteCategory {
        objects: s.graph.vertices.clone(),
        arrows: s.graph.edges.clone(),
        identities,
        composition,
    };
    let report = validate_category(&category);
    if !report.is_valid() {
        return Err(ExtractError::NotACategory(
            report.violations[0].message.clone(),
        ));
    }

    let accounted = underlying_sketch(&category).commutativities;
    let residue = s
        .commutativities
        .iter()
        .filter(|c| !accounted.contains(c))
        .cloned()
        .collect();
    Ok(Extraction { category, residue })
}

/// A diagram in a category: a finite shape graph and a graph morphism
/// into the category's underlying graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub shape: Graph,
    pub map: GraphMorphism,
}

impl Diagram {
    pub fn object_at(&self, shape_vertex: &str) -> Option<&str> {
        self.map.vertex(shape_vertex)
    }

    pub fn arrow_at(&self, shape_edge: &str) -> Option<&str> {
        self.map.edge(shape_edge)
    }

    pub fn is_well_formed(&self, c: &FiniteCategory) -> bool {
        self.map.is_graph_morphism(&self.shape, &c.graph())
    }
}

/// A cone (or cocone) over a diagram: an apex object and one leg arrow per
/// shape vertex. Limit legs run `vertex -> D(H)`, colimit legs `D(H) ->
/// vertex`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub orientation: ConvergenceKind,
    pub vertex: String,
    /// Shape vertex name -> arrow name.
    pub legs: BTreeMap<String, String>,
}

/// Do the legs commute with every edge of the diagram?
pub fn is_cone(c: &FiniteCategory, d: &Diagram, cone: &Cone) -> bool {
    if !c.has_object(&cone.vertex) {
        return false;
    }
    for h in &d.shape.vertices {
        let obj = match d.object_at(h) {
            Some(o) => o,
            None => return false,
        };
        let leg = match cone.legs.get(h).and_then(|l| c.arrow(l)) {
            Some(l) => l,
            None => return false,
        };
        let ok = match cone.orientation {
            ConvergenceKind::Limit => leg.source == cone.vertex && leg.target == obj,
            ConvergenceKind::Colimit => leg.source == obj && leg.target == cone.vertex,
        };
        if !ok {
            return false;
        }
    }
    for e in &d.shape.edges {
        let img = match d.arrow_at(&e.name) {
            Some(a) => a,
            None => return false,
        };
        let leg_src = cone.legs.get(&e.source).expect("checked total");
        let leg_tgt = cone.legs.get(&e.target).expect("checked total");
        let ok = match cone.orientation {
            // D(e) ∘ leg(source) = leg(target)
            ConvergenceKind::Limit => c.compose(img, leg_src) == Some(leg_tgt.as_str()),
            // leg(target) ∘ D(e) = leg(source)
            ConvergenceKind::Colimit => c.compose(leg_tgt, img) == Some(leg_src.as_str()),
        };
        if !ok {
            return false;
        }
    }
    true
}

/// All cones (or cocones) over a diagram, apexes and legs in declaration
/// order.
pub fn enumerate_cones(c: &FiniteCategory, d: &Diagram, orientation: ConvergenceKind) -> Vec<Cone> {
    let mut out = Vec::new();
    for v in &c.objects {
        // Per shape vertex, the candidate legs between apex and image.
        let mut slots: Vec<(&String, Vec<&Edge>)> = Vec::new();
        let mut feasible = true;
        for h in &d.shape.vertices {
            let obj = match d.object_at(h) {
                Some(o) => o,
                None => return Vec::new(),
            };
            let candidates = match orientation {
                ConvergenceKind::Limit => c.hom(v, obj),
                ConvergenceKind::Colimit => c.hom(obj, v),
            };
            if candidates.is_empty() {
                feasible = false;
                break;
            }
            slots.push((h, candidates));
        }
        if !feasible {
            continue;
        }
        let mut idx = vec![0usize; slots.len()];
        loop {
            let legs: BTreeMap<String, String> = slots
                .iter()
                .zip(&idx)
                .map(|((h, cands), i)| ((*h).clone(), cands[*i].name.clone()))
                .collect();
            let cone = Cone {
                orientation,
                vertex: v.clone(),
                legs,
            };
            if is_cone(c, d, &cone) {
                out.push(cone);
            }
            // Advance the odometer (last slot fastest); wrap-around to all
            // zeros means every assignment has been visited. Over the empty
            // shape this yields exactly one empty-legged cone per object.
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
    out
}

/// Arrows `m : from -> to.vertex` (limit) with `to.leg ∘ m = from.leg`
/// everywhere, or dually for colimits.
fn factorizations(c: &FiniteCategory, d: &Diagram, from: &Cone, to: &Cone) -> usize {
    let (src, tgt) = match to.orientation {
        ConvergenceKind::Limit => (from.vertex.as_str(), to.vertex.as_str()),
        ConvergenceKind::Colimit => (to.vertex.as_str(), from.vertex.as_str()),
    };
    c.hom(src, tgt)
        .into_iter()
        .filter(|m| {
            d.shape.vertices.iter().all(|h| {
                let leg_to = to.legs.get(h).expect("total");
                let leg_from = from.legs.get(h).expect("total");
                match to.orientation {
                    ConvergenceKind::Limit => {
                        c.compose(leg_to, &m.name) == Some(leg_from.as_str())
                    }
                    ConvergenceKind::Colimit => {
                        c.compose(&m.name, leg_to) == Some(leg_from.as_str())
                    }
                }
            })
        })
        .count()
}

/// Is the cone terminal among cones: does every competing cone factor
/// through it by exactly one arrow?
pub fn is_limiting_cone(c: &FiniteCategory, d: &Diagram, cone: &Cone) -> bool {
    if cone.orientation != ConvergenceKind::Limit || !is_cone(c, d, cone) {
        return false;
    }
    enumerate_cones(c, d, ConvergenceKind::Limit)
        .iter()
        .all(|competing| factorizations(c, d, competing, cone) == 1)
}

/// Is the cocone initial among cocones?
pub fn is_colimiting_cone(c: &FiniteCategory, d: &Diagram, cone: &Cone) -> bool {
    if cone.orientation != ConvergenceKind::Colimit || !is_cone(c, d, cone) {
        return false;
    }
    enumerate_cones(c, d, ConvergenceKind::Colimit)
        .iter()
        .all(|competing| factorizations(c, d, competing, cone) == 1)
}

/// Left-cancellable: `f ∘ g1 = f ∘ g2` forces `g1 = g2`.
pub fn is_mono(c: &FiniteCategory, f: &str) -> bool {
    let fe = match c.arrow(f) {
        Some(e) => e,
        None => return false,
    };
    for v in &c.objects {
        let candidates = c.hom(v, &fe.source);
        for g1 in &candidates {
            for g2 in &candidates {
                if g1.name != g2.name && c.compose(f, &g1.name) == c.compose(f, &g2.name) {
                    return false;
                }
            }
        }
    }
    true
}

/// Right-cancellable: `g1 ∘ f = g2 ∘ f` forces `g1 = g2`.
pub fn is_epi(c: &FiniteCategory, f: &str) -> bool {
    let fe = match c.arrow(f) {
        Some(e) => e,
        None => return false,
    };
    for v in &c.objects {
        let candidates = c.hom(&fe.target, v);
        for g1 in &candidates {
            for g2 in &candidates {
                if g1.name != g2.name && c.compose(&g1.name, f) == c.compose(&g2.name, f) {
                    return false;
                }
            }
        }
    }
    true
}

/// Has a two-sided inverse.
pub fn is_iso(c: &FiniteCategory, f: &str) -> bool {
    c.inverse_of(f).is_some()
}

/// The opposite category: arrows reversed (names kept), table transposed.
/// An involution.
pub fn dualize_category(c: &FiniteCategory) -> FiniteCategory {
    FiniteCategory {
        objects: c.objects.clone(),
        arrows: c
            .arrows
            .iter()
            .map(|a| Edge::new(a.name.clone(), a.target.clone(), a.source.clone()))
            .collect(),
        identities: c.identities.clone(),
        composition: c
            .composition
            .iter()
            .map(|((g, f), gf)| ((f.clone(), g.clone()), gf.clone()))
            .collect(),
    }
}

impl fmt::Display for FiniteCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "category with {} objects and {} arrows",
            self.objects.len(),
            self.arrows.len()
        )
    }
}
