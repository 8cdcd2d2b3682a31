//! Structures: interpretations of sketches in finite categories.
//!
//! A structure sends vertices to objects and edges to arrows so that every
//! commutativity condition becomes an equation the composition table
//! satisfies and every convergence condition becomes an actual limit or
//! colimit cone. Structures restrict along sketch morphisms; the fibre of
//! a morphism at a structure collects its strict extensions. Natural
//! transformations between structures are enumerated componentwise.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, ValidationReport};
use crate::fincat::{self, Cone, Diagram, FiniteCategory};
use crate::kernel::{ConvergenceKind, GraphMorphism, Path, Sketch, SketchMorphism};
use crate::Budget;

/// An interpretation of a sketch in a category. The `sketch` and
/// `category` fields carry document-level names for reporting and may be
/// empty on computed structures.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Structure {
    pub sketch: String,
    pub category: String,
    /// Sketch vertex -> object.
    pub vertex_map: BTreeMap<String, String>,
    /// Sketch edge -> arrow.
    pub edge_map: BTreeMap<String, String>,
}

impl Structure {
    pub fn vertex(&self, v: &str) -> Option<&str> {
        self.vertex_map.get(v).map(|s| s.as_str())
    }

    pub fn edge(&self, e: &str) -> Option<&str> {
        self.edge_map.get(e).map(|s| s.as_str())
    }

    /// The same data as a graph morphism into the category's graph.
    pub fn as_morphism(&self) -> GraphMorphism {
        GraphMorphism {
            vertex_map: self.vertex_map.clone(),
            edge_map: self.edge_map.clone(),
        }
    }

    /// Map a sketch path to a category path.
    pub fn apply_path(&self, p: &Path) -> Option<Path> {
        Some(Path {
            start: self.vertex(&p.start)?.to_string(),
            edges: p
                .edges
                .iter()
                .map(|e| self.edge(e).map(|s| s.to_string()))
                .collect::<Option<Vec<_>>>()?,
        })
    }

    /// Do two structures interpret the same items the same way, ignoring
    /// the name metadata?
    pub fn same_interpretation(&self, other: &Structure) -> bool {
        self.vertex_map == other.vertex_map && self.edge_map == other.edge_map
    }
}

/// Instantiate a convergence condition under a structure: the diagram in
/// the category and the cone the structure provides for it.
pub fn instantiate_convergence(
    f: &Structure,
    cond: &crate::kernel::ConvergenceCondition,
) -> Option<(Diagram, Cone)> {
    let mut map = GraphMorphism::default();
    for h in &cond.shape.vertices {
        let img = cond.diagram.vertex(h)?;
        map.vertex_map
            .insert(h.clone(), f.vertex(img)?.to_string());
    }
    for e in &cond.shape.edges {
        let img = cond.diagram.edge(&e.name)?;
        map.edge_map.insert(e.name.clone(), f.edge(img)?.to_string());
    }
    let mut legs = BTreeMap::new();
    for (h, leg) in &cond.legs {
        legs.insert(h.clone(), f.edge(leg)?.to_string());
    }
    Some((
        Diagram {
            shape: cond.shape.clone(),
            map,
        },
        Cone {
            orientation: cond.kind,
            vertex: f.vertex(&cond.apex)?.to_string(),
            legs,
        },
    ))
}

/// Full validity of a structure: total well-typed maps, every
/// commutativity satisfied by the composition table, every convergence
/// interpreted by an actual limiting (or colimiting) cone.
pub fn validate_structure(f: &Structure, s: &Sketch, c: &FiniteCategory) -> ValidationReport {
    let mut report = ValidationReport::valid();

    for v in &s.graph.vertices {
        match f.vertex(v) {
            None => report.push(format!("vertex {v}"), "not mapped"),
            Some(img) if !c.has_object(img) => {
                report.push(format!("vertex {v}"), format!("image `{img}` is not an object"))
            }
            Some(_) => {}
        }
    }
    for e in &s.graph.edges {
        let img = match f.edge(&e.name) {
            None => {
                report.push(format!("edge {}", e.name), "not mapped");
                continue;
            }
            Some(img) => img,
        };
        let arrow = match c.arrow(img) {
            None => {
                report.push(
                    format!("edge {}", e.name),
                    format!("image `{img}` is not an arrow"),
                );
                continue;
            }
            Some(a) => a,
        };
        if f.vertex(&e.source) != Some(arrow.source.as_str())
            || f.vertex(&e.target) != Some(arrow.target.as_str())
        {
            report.push(
                format!("edge {}", e.name),
                format!("image `{img}` has wrong endpoints"),
            );
        }
    }
    for v in f.vertex_map.keys() {
        if !s.graph.has_vertex(v) {
            report.push(format!("vertex {v}"), "not a sketch vertex");
        }
    }
    for e in f.edge_map.keys() {
        if s.graph.edge(e).is_none() {
            report.push(format!("edge {e}"), "not a sketch edge");
        }
    }
    if !report.is_valid() {
        return report;
    }

    for (i, cond) in s.commutativities.iter().enumerate() {
        let loc = format!("commutativity[{i}] {cond}");
        let lhs = f.apply_path(&cond.lhs).and_then(|p| c.compose_path(&p));
        let rhs = f.apply_path(&cond.rhs).and_then(|p| c.compose_path(&p));
        match (lhs, rhs) {
            (Some(l), Some(r)) if l == r => {}
            (Some(l), Some(r)) => {
                report.push(loc, format!("paths evaluate to `{l}` and `{r}`"));
            }
            _ => report.push(loc, "a path does not evaluate in the category"),
        }
    }
    for (i, cond) in s.convergences.iter().enumerate() {
        let loc = format!("convergence[{i}] {cond}");
        match instantiate_convergence(f, cond) {
            None => report.push(loc, "condition does not instantiate"),
            Some((diagram, cone)) => {
                let ok = match cond.kind {
                    ConvergenceKind::Limit => fincat::is_limiting_cone(c, &diagram, &cone),
                    ConvergenceKind::Colimit => fincat::is_colimiting_cone(c, &diagram, &cone),
                };
                if !ok {
                    report.push(loc, "cone is not limiting for the instantiated diagram");
                }
            }
        }
    }
    report
}

/// Refuse when `objects^vertices * arrows^edges` exceeds the budget; the
/// comparison runs in log form so huge inputs cannot overflow.
/// Running enumeration meter: counts explored candidates (vertex
/// assignments and full edge combinations) and trips once the count
/// passes the budget. Counting what is actually explored, rather than a
/// worst-case `|objects|^|vertices| * |arrows|^|edges|` estimate, lets
/// hom-sparse categories (posets, free arrows) enumerate large sketches
/// cheaply while still refusing genuine blowups.
struct EnumerationMeter<'a> {
    spent: u64,
    budget: Budget,
    context: &'a str,
}

impl<'a> EnumerationMeter<'a> {
    fn new(budget: Budget, context: &'a str) -> Self {
        EnumerationMeter {
            spent: 0,
            budget,
            context,
        }
    }

    fn charge(&mut self) -> Result<(), Error> {
        self.spent = self.spent.saturating_add(1);
        if self.spent > self.budget.max_candidates {
            return Err(Error::BudgetExceeded {
                bound: format!("more than {} candidates explored", self.budget.max_candidates),
                max: self.budget.max_candidates,
                context: self.context.to_string(),
            });
        }
        Ok(())
    }
}

/// Every valid structure of `s` in `c`, in canonical order: vertices are
/// assigned objects in declaration order (odometer, last vertex fastest),
/// then edges range over the hom sets their endpoints allow.
pub fn enumerate_structures(
    s: &Sketch,
    c: &FiniteCategory,
    budget: Budget,
) -> Result<Vec<Structure>, Error> {
    let fixed = Structure::default();
    enumerate_extensions(s, c, &fixed, budget)
}

/// Like [`enumerate_structures`] but with some vertices and edges already
/// pinned by `fixed`; only the remaining items are enumerated.
fn enumerate_extensions(
    s: &Sketch,
    c: &FiniteCategory,
    fixed: &Structure,
    budget: Budget,
) -> Result<Vec<Structure>, Error> {
    let free_vertices: Vec<&String> = s
        .graph
        .vertices
        .iter()
        .filter(|v| !fixed.vertex_map.contains_key(*v))
        .collect();
    let free_edges: Vec<&crate::kernel::Edge> = s
        .graph
        .edges
        .iter()
        .filter(|e| !fixed.edge_map.contains_key(&e.name))
        .collect();
    let mut meter = EnumerationMeter::new(budget, "structure enumeration");

    let mut out = Vec::new();
    if (!free_vertices.is_empty() && c.objects.is_empty())
        || (!free_edges.is_empty() && c.arrows.is_empty())
    {
        return Ok(out);
    }

    let mut vertex_idx = vec![0usize; free_vertices.len()];
    'vertices: loop {
        meter.charge()?;
        let mut candidate = fixed.clone();
        for (v, i) in free_vertices.iter().zip(&vertex_idx) {
            candidate
                .vertex_map
                .insert((*v).clone(), c.objects[*i].clone());
        }
        // For this vertex assignment, each free edge ranges over the hom
        // set between the images of its endpoints.
        let mut slots: Vec<Vec<&str>> = Vec::with_capacity(free_edges.len());
        let mut feasible = true;
        for e in &free_edges {
            let (src, tgt) = match (candidate.vertex(&e.source), candidate.vertex(&e.target)) {
                (Some(s), Some(t)) => (s, t),
                _ => {
                    feasible = false;
                    break;
                }
            };
            let homs: Vec<&str> = c.hom(src, tgt).into_iter().map(|a| a.name.as_str()).collect();
            if homs.is_empty() {
                feasible = false;
                break;
            }
            slots.push(homs);
        }
        if feasible {
            let slots: Vec<Vec<String>> = slots
                .into_iter()
                .map(|v| v.into_iter().map(|s| s.to_string()).collect())
                .collect();
            let mut edge_idx = vec![0usize; slots.len()];
            loop {
                meter.charge()?;
                let mut full = candidate.clone();
                for ((e, slot), i) in free_edges.iter().zip(&slots).zip(&edge_idx) {
                    full.edge_map.insert(e.name.clone(), slot[*i].clone());
                }
                if validate_structure(&full, s, c).is_valid() {
                    out.push(full);
                }
                let mut k = slots.len();
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    edge_idx[k] += 1;
                    if edge_idx[k] < slots[k].len() {
                        break;
                    }
                    edge_idx[k] = 0;
                }
                if edge_idx.iter().all(|i| *i == 0) {
                    break;
                }
            }
        }
        let mut k = free_vertices.len();
        loop {
            if k == 0 {
                break 'vertices;
            }
            k -= 1;
            vertex_idx[k] += 1;
            if vertex_idx[k] < c.objects.len() {
                break;
            }
            vertex_idx[k] = 0;
        }
        if vertex_idx.iter().all(|i| *i == 0) {
            break;
        }
    }
    Ok(out)
}

/// Precompose a structure with a sketch morphism: the interpretation of
/// the morphism's source sketch.
pub fn restrict_structure(f: &Structure, m: &SketchMorphism) -> Result<Structure, Error> {
    let mut out = Structure {
        sketch: String::new(),
        category: f.category.clone(),
        ..Default::default()
    };
    for (v, img) in &m.vertex_map {
        let val = f.vertex(img).ok_or_else(|| Error::Unresolved {
            name: img.clone(),
            context: format!("structure has no value for the image of vertex `{v}`"),
        })?;
        out.vertex_map.insert(v.clone(), val.to_string());
    }
    for (e, img) in &m.edge_map {
        let val = f.edge(img).ok_or_else(|| Error::Unresolved {
            name: img.clone(),
            context: format!("structure has no value for the image of edge `{e}`"),
        })?;
        out.edge_map.insert(e.clone(), val.to_string());
    }
    Ok(out)
}

/// The strict fibre of `m : src -> dst` at a `src`-structure `g`: every
/// valid `dst`-structure whose restriction along `m` is exactly `g`.
///
/// Items in the image of `m` are pinned by `g` before enumeration, so the
/// budget only counts genuinely free items. If `m` merges two items that
/// `g` interprets differently the fibre is empty.
pub fn fibre(
    m: &SketchMorphism,
    src: &Sketch,
    dst: &Sketch,
    c: &FiniteCategory,
    g: &Structure,
    budget: Budget,
) -> Result<Vec<Structure>, Error> {
    let mut fixed = Structure {
        sketch: String::new(),
        category: g.category.clone(),
        ..Default::default()
    };
    for v in &src.graph.vertices {
        let img = m.vertex(v).ok_or_else(|| Error::Unresolved {
            name: v.clone(),
            context: "morphism has no image for a source vertex".to_string(),
        })?;
        let val = g.vertex(v).ok_or_else(|| Error::Unresolved {
            name: v.clone(),
            context: "base structure has no value for a source vertex".to_string(),
        })?;
        if let Some(prev) = fixed.vertex(img) {
            if prev != val {
                return Ok(Vec::new());
            }
        }
        fixed.vertex_map.insert(img.to_string(), val.to_string());
    }
    for e in &src.graph.edges {
        let img = m.edge(&e.name).ok_or_else(|| Error::Unresolved {
            name: e.name.clone(),
            context: "morphism has no image for a source edge".to_string(),
        })?;
        let val = g.edge(&e.name).ok_or_else(|| Error::Unresolved {
            name: e.name.clone(),
            context: "base structure has no value for a source edge".to_string(),
        })?;
        if let Some(prev) = fixed.edge(img) {
            if prev != val {
                return Ok(Vec::new());
            }
        }
        fixed.edge_map.insert(img.to_string(), val.to_string());
    }
    enumerate_extensions(dst, c, &fixed, budget)
}

/// A transformation between two structures of one sketch: an arrow per
/// sketch vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NatTransformation {
    pub source: Structure,
    pub target: Structure,
    /// Sketch vertex -> component arrow `source(v) -> target(v)`.
    pub components: BTreeMap<String, String>,
}

impl NatTransformation {
    pub fn component(&self, v: &str) -> Option<&str> {
        self.components.get(v).map(|s| s.as_str())
    }
}

/// Totality, typing, and the naturality square for every sketch edge:
/// `target(e) ∘ n(source of e) = n(target of e) ∘ source(e)`.
pub fn is_natural(n: &NatTransformation, s: &Sketch, c: &FiniteCategory) -> bool {
    for v in &s.graph.vertices {
        let comp = match n.component(v).and_then(|a| c.arrow(a)) {
            Some(a) => a,
            None => return false,
        };
        match (n.source.vertex(v), n.target.vertex(v)) {
            (Some(src), Some(tgt)) if comp.source == src && comp.target == tgt => {}
            _ => return false,
        }
    }
    for e in &s.graph.edges {
        let (fe, ge) = match (n.source.edge(&e.name), n.target.edge(&e.name)) {
            (Some(a), Some(b)) => (a, b),
            _ => return false,
        };
        let n_src = n.component(&e.source).expect("checked total");
        let n_tgt = n.component(&e.target).expect("checked total");
        if c.compose(ge, n_src) != c.compose(n_tgt, fe) {
            return false;
        }
    }
    true
}

/// The identity transformation of a structure.
pub fn identity_transformation(f: &Structure, s: &Sketch, c: &FiniteCategory) -> NatTransformation {
    let components = s
        .graph
        .vertices
        .iter()
        .filter_map(|v| {
            let obj = f.vertex(v)?;
            Some((v.clone(), c.identity_of(obj)?.to_string()))
        })
        .collect();
    NatTransformation {
        source: f.clone(),
        target: f.clone(),
        components,
    }
}

/// All natural transformations from `f` to `g`, components enumerated per
/// vertex in declaration order.
pub fn enumerate_transformations(
    f: &Structure,
    g: &Structure,
    s: &Sketch,
    c: &FiniteCategory,
    budget: Budget,
) -> Result<Vec<NatTransformation>, Error> {
    let mut slots: Vec<(String, Vec<String>)> = Vec::new();
    for v in &s.graph.vertices {
        let (src, tgt) = match (f.vertex(v), g.vertex(v)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(Vec::new()),
        };
        let homs: Vec<String> = c.hom(src, tgt).into_iter().map(|a| a.name.clone()).collect();
        if homs.is_empty() {
            return Ok(Vec::new());
        }
        slots.push((v.clone(), homs));
    }
    let mut ln_bound = 0f64;
    for (_, homs) in &slots {
        ln_bound += (homs.len() as f64).ln();
    }
    if ln_bound > (budget.max_candidates.max(1) as f64).ln() {
        return Err(Error::BudgetExceeded {
            bound: "product of hom set sizes".to_string(),
            max: budget.max_candidates,
            context: "transformation enumeration".to_string(),
        });
    }

    let mut out = Vec::new();
    let mut idx = vec![0usize; slots.len()];
    loop {
        let components: BTreeMap<String, String> = slots
            .iter()
            .zip(&idx)
            .map(|((v, homs), i)| (v.clone(), homs[*i].clone()))
            .collect();
        let n = NatTransformation {
            source: f.clone(),
            target: g.clone(),
            components,
        };
        if is_natural(&n, s, c) {
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
    Ok(out)
}

/// Is every component invertible?
pub fn is_iso_transformation(n: &NatTransformation, c: &FiniteCategory) -> bool {
    n.components.values().all(|a| fincat::is_iso(c, a))
}

/// Invert an isomorphism componentwise.
pub fn invert_transformation(
    n: &NatTransformation,
    c: &FiniteCategory,
) -> Result<NatTransformation, Error> {
    let mut components = BTreeMap::new();
    for (v, a) in &n.components {
        let inv = c.inverse_of(a).ok_or_else(|| Error::NotInvertible {
            arrow: a.clone(),
            category: n.source.category.clone(),
        })?;
        components.insert(v.clone(), inv.to_string());
    }
    Ok(NatTransformation {
        source: n.target.clone(),
        target: n.source.clone(),
        components,
    })
}

/// Vertical composition `second ∘ first` (first applied first).
pub fn compose_transformations(
    second: &NatTransformation,
    first: &NatTransformation,
    c: &FiniteCategory,
) -> Option<NatTransformation> {
    if !first.target.same_interpretation(&second.source) {
        return None;
    }
    let mut components = BTreeMap::new();
    for (v, a) in &first.components {
        let b = second.component(v)?;
        components.insert(v.clone(), c.compose(b, a)?.to_string());
    }
    Some(NatTransformation {
        source: first.source.clone(),
        target: second.target.clone(),
        components,
    })
}

/// Restrict a transformation along a sketch morphism: component at `v` is
/// the component at `m(v)`.
pub fn restrict_transformation(
    n: &NatTransformation,
    m: &SketchMorphism,
) -> Result<NatTransformation, Error> {
    let mut components = BTreeMap::new();
    for (v, img) in &m.vertex_map {
        let comp = n.component(img).ok_or_else(|| Error::Unresolved {
            name: img.clone(),
            context: format!("transformation has no component at the image of `{v}`"),
        })?;
        components.insert(v.clone(), comp.to_string());
    }
    Ok(NatTransformation {
        source: restrict_structure(&n.source, m)?,
        target: restrict_structure(&n.target, m)?,
        components,
    })
}

/// Transport a structure along an isomorphism of its restriction.
///
/// Given `m : src -> dst` injective on vertices, a `dst`-structure `h`,
/// and an isomorphism `i : restrict(m, h) -> g` of `src`-structures, build
/// the `dst`-structure `e` that agrees with `g` on the image of `m` and
/// with `h` elsewhere, together with the isomorphism `j : h -> e` whose
/// restriction is `i`. Components of `j` are those of `i` on the image and
/// identities elsewhere; each `dst`-edge is conjugated:
/// `e(b) = j(target) ∘ h(b) ∘ j(source)⁻¹`.
pub fn transport_along_iso(
    m: &SketchMorphism,
    src: &Sketch,
    dst: &Sketch,
    c: &FiniteCategory,
    h: &Structure,
    i: &NatTransformation,
) -> Result<(Structure, NatTransformation), Error> {
    let mut image_of: BTreeMap<&str, &str> = BTreeMap::new(); // dst vertex -> src vertex
    for (v, img) in &m.vertex_map {
        if image_of.insert(img.as_str(), v.as_str()).is_some() {
            return Err(Error::Precondition(format!(
                "morphism is not injective on vertices at `{img}`"
            )));
        }
    }
    let restricted = restrict_structure(h, m)?;
    if !restricted.same_interpretation(&i.source) {
        return Err(Error::Precondition(
            "isomorphism source is not the restriction of the structure".to_string(),
        ));
    }
    if !is_natural(i, src, c) {
        return Err(Error::Precondition(
            "transformation is not natural over the source sketch".to_string(),
        ));
    }
    let g = &i.target;

    // j : h -> e, component per dst vertex.
    let mut j_components: BTreeMap<String, String> = BTreeMap::new();
    let mut e = Structure {
        sketch: h.sketch.clone(),
        category: h.category.clone(),
        ..Default::default()
    };
    for w in &dst.graph.vertices {
        match image_of.get(w.as_str()) {
            Some(v) => {
                let comp = i.component(v).ok_or_else(|| Error::Unresolved {
                    name: (*v).to_string(),
                    context: "isomorphism has no component at a source vertex".to_string(),
                })?;
                if !fincat::is_iso(c, comp) {
                    return Err(Error::NotInvertible {
                        arrow: comp.to_string(),
                        category: h.category.clone(),
                    });
                }
                let val = g.vertex(v).ok_or_else(|| Error::Unresolved {
                    name: (*v).to_string(),
                    context: "target structure has no value for a source vertex".to_string(),
                })?;
                e.vertex_map.insert(w.clone(), val.to_string());
                j_components.insert(w.clone(), comp.to_string());
            }
            None => {
                let val = h.vertex(w).ok_or_else(|| Error::Unresolved {
                    name: w.clone(),
                    context: "structure has no value for a vertex".to_string(),
                })?;
                e.vertex_map.insert(w.clone(), val.to_string());
                let id = c.identity_of(val).ok_or_else(|| Error::Unresolved {
                    name: val.to_string(),
                    context: "object has no identity".to_string(),
                })?;
                j_components.insert(w.clone(), id.to_string());
            }
        }
    }
    for b in &dst.graph.edges {
        let hb = h.edge(&b.name).ok_or_else(|| Error::Unresolved {
            name: b.name.clone(),
            context: "structure has no value for an edge".to_string(),
        })?;
        let j_src = &j_components[&b.source];
        let j_tgt = &j_components[&b.target];
        let j_src_inv = c.inverse_of(j_src).ok_or_else(|| Error::NotInvertible {
            arrow: j_src.clone(),
            category: h.category.clone(),
        })?;
        let tmp = c
            .compose(hb, j_src_inv)
            .ok_or_else(|| Error::Precondition(format!("`{hb}` does not compose in transport")))?;
        let eb = c
            .compose(j_tgt, tmp)
            .ok_or_else(|| Error::Precondition(format!("`{tmp}` does not compose in transport")))?;
        e.edge_map.insert(b.name.clone(), eb.to_string());
    }
    let j = NatTransformation {
        source: h.clone(),
        target: e.clone(),
        components: j_components,
    };
    Ok((e, j))
}

/// Reinterpret a structure over the dual sketch in the dual category; the
/// underlying maps do not change.
pub fn dualize_structure(f: &Structure) -> Structure {
    f.clone()
}

/// All objects and arrows named by a structure exist in the category; a
/// cheap sanity check used by callers that assemble structures by hand.
pub fn names_resolve(f: &Structure, c: &FiniteCategory) -> bool {
    f.vertex_map.values().all(|o| c.has_object(o))
        && f.edge_map.values().all(|a| c.arrow(a).is_some())
}

/// The set of objects a structure uses (handy for reports).
pub fn objects_used(f: &Structure) -> BTreeSet<&str> {
    f.vertex_map.values().map(|s| s.as_str()).collect()
}
