//! Graphs, paths, conditions, sketches, and sketch morphisms.
//!
//! Everything here is finite and name-addressed: vertices, edges, objects
//! and arrows are identified by strings, and equality of names is equality
//! of items. That convention makes subsketch inclusions literal (the
//! inclusion morphism is the identity on names) and keeps dualization an
//! involution on the nose.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::ValidationReport;

/// A directed edge with a name; multiple edges may share endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub name: String,
    pub source: String,
    pub target: String,
}

impl Edge {
    pub fn new(name: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        Edge {
            name: name.into(),
            source: source.into(),
            target: target.into(),
        }
    }
}

/// A finite directed multigraph. Vertices and edges keep declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn has_vertex(&self, name: &str) -> bool {
        self.vertices.iter().any(|v| v == name)
    }

    pub fn edge(&self, name: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.name == name)
    }

    /// Edges from `source` to `target`, in declaration order.
    pub fn edges_between<'g>(&'g self, source: &str, target: &str) -> impl Iterator<Item = &'g Edge> {
        let (s, t) = (source.to_string(), target.to_string());
        self.edges
            .iter()
            .filter(move |e| e.source == s && e.target == t)
    }

    /// Same names, every edge reversed. An involution.
    pub fn reversed(&self) -> Graph {
        Graph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge::new(e.name.clone(), e.target.clone(), e.source.clone()))
                .collect(),
        }
    }
}

/// Well-formedness of a graph: declared endpoints, no duplicate names,
/// and no vertex/edge name collision (names address items unambiguously).
pub fn validate_graph(g: &Graph) -> ValidationReport {
    let mut report = ValidationReport::valid();
    let mut seen_v = BTreeSet::new();
    for v in &g.vertices {
        if !seen_v.insert(v.clone()) {
            report.push(format!("vertex {v}"), "duplicate vertex name");
        }
    }
    let mut seen_e = BTreeSet::new();
    for e in &g.edges {
        if !seen_e.insert(e.name.clone()) {
            report.push(format!("edge {}", e.name), "duplicate edge name");
        }
        if seen_v.contains(&e.name) {
            report.push(
                format!("edge {}", e.name),
                "edge name collides with a vertex name",
            );
        }
        if !g.has_vertex(&e.source) {
            report.push(
                format!("edge {}", e.name),
                format!("source `{}` is not a declared vertex", e.source),
            );
        }
        if !g.has_vertex(&e.target) {
            report.push(
                format!("edge {}", e.name),
                format!("target `{}` is not a declared vertex", e.target),
            );
        }
    }
    report
}

/// A finite path: a start vertex and a (possibly empty) run of edges,
/// stored in traversal order. The empty path at `B` stands for the
/// identity at `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Path {
    pub start: String,
    /// Edge names, first-traversed first.
    pub edges: Vec<String>,
}

impl Path {
    pub fn identity(start: impl Into<String>) -> Self {
        Path {
            start: start.into(),
            edges: Vec::new(),
        }
    }

    /// Build from edges in traversal order; the start is the first source.
    pub fn through(edges: &[&Edge]) -> Self {
        Path {
            start: edges
                .first()
                .map(|e| e.source.clone())
                .unwrap_or_default(),
            edges: edges.iter().map(|e| e.name.clone()).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The vertex the path ends at, if every hop is well-formed in `g`.
    pub fn end<'a>(&'a self, g: &'a Graph) -> Option<&'a str> {
        let mut at: &str = &self.start;
        if !g.has_vertex(at) {
            return None;
        }
        for name in &self.edges {
            let e = g.edge(name)?;
            if e.source != at {
                return None;
            }
            at = &e.target;
        }
        Some(at)
    }

    /// All vertices the path touches (start included), if well-formed.
    pub fn vertices(&self, g: &Graph) -> Option<Vec<String>> {
        let mut out = vec![self.start.clone()];
        let mut at: &str = &self.start;
        if !g.has_vertex(at) {
            return None;
        }
        for name in &self.edges {
            let e = g.edge(name)?;
            if e.source != at {
                return None;
            }
            at = &e.target;
            out.push(at.to_string());
        }
        Some(out)
    }

    /// The reverse path in the reversed graph.
    pub fn reversed(&self, g: &Graph) -> Path {
        let start = self
            .end(g)
            .map(|s| s.to_string())
            .unwrap_or_else(|| self.start.clone());
        Path {
            start,
            edges: self.edges.iter().rev().cloned().collect(),
        }
    }
}

impl fmt::Display for Path {
    /// Composition order: `h.g.f` applies `f` first; empty renders `id(B)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.edges.is_empty() {
            write!(f, "id({})", self.start)
        } else {
            let names: Vec<&str> = self.edges.iter().rev().map(|s| s.as_str()).collect();
            write!(f, "{}", names.join("."))
        }
    }
}

/// Two parallel paths required to agree in every structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutativityCondition {
    pub lhs: Path,
    pub rhs: Path,
}

impl fmt::Display for CommutativityCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Whether a convergence condition asks for a limit or a colimit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceKind {
    Limit,
    Colimit,
}

impl ConvergenceKind {
    pub fn flipped(self) -> Self {
        match self {
            ConvergenceKind::Limit => ConvergenceKind::Colimit,
            ConvergenceKind::Colimit => ConvergenceKind::Limit,
        }
    }
}

/// A pair of total maps between graphs; doubles as a sketch morphism.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GraphMorphism {
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

/// A sketch morphism is carried by the same data as a graph morphism;
/// condition preservation is the predicate [`is_sketch_morphism`].
pub type SketchMorphism = GraphMorphism;

impl GraphMorphism {
    /// The identity morphism on a graph.
    pub fn identity_on(g: &Graph) -> Self {
        GraphMorphism {
            vertex_map: g.vertices.iter().map(|v| (v.clone(), v.clone())).collect(),
            edge_map: g.edges.iter().map(|e| (e.name.clone(), e.name.clone())).collect(),
        }
    }

    /// The inclusion of a subgraph: identity on the subgraph's names.
    pub fn inclusion_of(sub: &Graph) -> Self {
        GraphMorphism::identity_on(sub)
    }

    pub fn vertex(&self, v: &str) -> Option<&str> {
        self.vertex_map.get(v).map(|s| s.as_str())
    }

    pub fn edge(&self, e: &str) -> Option<&str> {
        self.edge_map.get(e).map(|s| s.as_str())
    }

    /// Totality plus endpoint preservation from `src` into `dst`.
    pub fn is_graph_morphism(&self, src: &Graph, dst: &Graph) -> bool {
        for v in &src.vertices {
            match self.vertex(v) {
                Some(img) if dst.has_vertex(img) => {}
                _ => return false,
            }
        }
        for e in &src.edges {
            let img = match self.edge(&e.name).and_then(|n| dst.edge(n)) {
                Some(img) => img,
                None => return false,
            };
            if self.vertex(&e.source) != Some(img.source.as_str())
                || self.vertex(&e.target) != Some(img.target.as_str())
            {
                return false;
            }
        }
        true
    }

    /// Apply edge-wise; the start maps through the vertex map.
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

    pub fn apply_commutativity(&self, c: &CommutativityCondition) -> Option<CommutativityCondition> {
        Some(CommutativityCondition {
            lhs: self.apply_path(&c.lhs)?,
            rhs: self.apply_path(&c.rhs)?,
        })
    }

    /// The image condition keeps the shape and composes the diagram with
    /// this morphism.
    pub fn apply_convergence(&self, c: &ConvergenceCondition) -> Option<ConvergenceCondition> {
        let mut diagram = GraphMorphism::default();
        for (h, img) in &c.diagram.vertex_map {
            diagram
                .vertex_map
                .insert(h.clone(), self.vertex(img)?.to_string());
        }
        for (h, img) in &c.diagram.edge_map {
            diagram
                .edge_map
                .insert(h.clone(), self.edge(img)?.to_string());
        }
        let mut legs = BTreeMap::new();
        for (h, leg) in &c.legs {
            legs.insert(h.clone(), self.edge(leg)?.to_string());
        }
        Some(ConvergenceCondition {
            kind: c.kind,
            shape: c.shape.clone(),
            diagram,
            apex: self.vertex(&c.apex)?.to_string(),
            legs,
        })
    }

    /// `other` after `self`.
    pub fn then(&self, other: &GraphMorphism) -> Option<GraphMorphism> {
        let mut out = GraphMorphism::default();
        for (k, v) in &self.vertex_map {
            out.vertex_map.insert(k.clone(), other.vertex(v)?.to_string());
        }
        for (k, v) in &self.edge_map {
            out.edge_map.insert(k.clone(), other.edge(v)?.to_string());
        }
        Some(out)
    }
}

/// A finite limit or colimit specification: a shape graph, a diagram
/// mapping the shape into the ambient graph, an apex vertex, and one leg
/// per shape vertex. For a limit the leg at `H` runs `apex -> D(H)`; for a
/// colimit it runs `D(H) -> apex`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceCondition {
    pub kind: ConvergenceKind,
    pub shape: Graph,
    pub diagram: GraphMorphism,
    pub apex: String,
    /// Shape vertex name -> ambient edge name.
    pub legs: BTreeMap<String, String>,
}

impl fmt::Display for ConvergenceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ConvergenceKind::Limit => "limit",
            ConvergenceKind::Colimit => "colimit",
        };
        write!(
            f,
            "{kind} {} over {}-vertex shape",
            self.apex,
            self.shape.vertices.len()
        )
    }
}

/// A finite graph with commutativity and convergence conditions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Sketch {
    pub graph: Graph,
    pub commutativities: Vec<CommutativityCondition>,
    pub convergences: Vec<ConvergenceCondition>,
}

/// The ambient items (vertices and edges) a condition mentions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Items {
    pub vertices: BTreeSet<String>,
    pub edges: BTreeSet<String>,
}

impl Items {
    pub fn is_within(&self, vertices: &BTreeSet<String>, edges: &BTreeSet<String>) -> bool {
        self.vertices.is_subset(vertices) && self.edges.is_subset(edges)
    }
}

/// Items mentioned by a commutativity condition, or `None` if a path is
/// not well-formed in `g`.
pub fn commutativity_items(c: &CommutativityCondition, g: &Graph) -> Option<Items> {
    let mut items = Items::default();
    for p in [&c.lhs, &c.rhs] {
        items.vertices.extend(p.vertices(g)?);
        items.edges.extend(p.edges.iter().cloned());
    }
    Some(items)
}

/// Items mentioned by a convergence condition: apex, legs, and the
/// diagram's image.
pub fn convergence_items(c: &ConvergenceCondition, g: &Graph) -> Option<Items> {
    let mut items = Items::default();
    items.vertices.insert(c.apex.clone());
    for h in &c.shape.vertices {
        let img = c.diagram.vertex(h)?;
        items.vertices.insert(img.to_string());
        let leg = c.legs.get(h)?;
        g.edge(leg)?;
        items.edges.insert(leg.clone());
    }
    for e in &c.shape.edges {
        let img = c.diagram.edge(&e.name)?;
        g.edge(img)?;
        items.edges.insert(img.to_string());
    }
    Some(items)
}

/// Full well-formedness of a sketch: graph validity, path validity,
/// matching path endpoints, and coherent convergence data.
pub fn validate_sketch(s: &Sketch) -> ValidationReport {
    let mut report = validate_graph(&s.graph);

    for (i, c) in s.commutativities.iter().enumerate() {
        let loc = format!("commutativity[{i}]");
        let lhs_end = c.lhs.end(&s.graph);
        let rhs_end = c.rhs.end(&s.graph);
        if lhs_end.is_none() {
            report.push(&loc, format!("left path `{}` is not a path in the graph", c.lhs));
        }
        if rhs_end.is_none() {
            report.push(&loc, format!("right path `{}` is not a path in the graph", c.rhs));
        }
        if let (Some(le), Some(re)) = (lhs_end, rhs_end) {
            if c.lhs.start != c.rhs.start {
                report.push(&loc, "paths start at different vertices");
            }
            if le != re {
                report.push(&loc, "paths end at different vertices");
            }
        }
    }

    for (i, c) in s.convergences.iter().enumerate() {
        let loc = format!("convergence[{i}]");
        let shape_report = validate_graph(&c.shape);
        if !shape_report.is_valid() {
            report.absorb(&format!("{loc}/shape "), shape_report);
            continue;
        }
        if !c.diagram.is_graph_morphism(&c.shape, &s.graph) {
            report.push(&loc, "diagram is not a graph morphism from the shape");
            continue;
        }
        if !s.graph.has_vertex(&c.apex) {
            report.push(&loc, format!("apex `{}` is not a declared vertex", c.apex));
            continue;
        }
        for h in &c.shape.vertices {
            let leg = match c.legs.get(h) {
                Some(leg) => leg,
                None => {
                    report.push(&loc, format!("shape vertex `{h}` has no leg"));
                    continue;
                }
            };
            let edge = match s.graph.edge(leg) {
                Some(e) => e,
                None => {
                    report.push(&loc, format!("leg `{leg}` is not a declared edge"));
                    continue;
                }
            };
            let d_h = c.diagram.vertex(h).expect("diagram checked total");
            let (want_src, want_tgt) = match c.kind {
                ConvergenceKind::Limit => (c.apex.as_str(), d_h),
                ConvergenceKind::Colimit => (d_h, c.apex.as_str()),
            };
            if edge.source != want_src || edge.target != want_tgt {
                report.push(
                    &loc,
                    format!(
                        "leg `{leg}` at `{h}` runs {} -> {}, expected {} -> {}",
                        edge.source, edge.target, want_src, want_tgt
                    ),
                );
            }
        }
        for h in c.legs.keys() {
            if !c.shape.has_vertex(h) {
                report.push(&loc, format!("leg key `{h}` is not a shape vertex"));
            }
        }
    }

    report
}

/// Does `m` preserve graph structure and carry every condition of `src`
/// to a condition present in `dst`?
pub fn is_sketch_morphism(m: &SketchMorphism, src: &Sketch, dst: &Sketch) -> bool {
    if !m.is_graph_morphism(&src.graph, &dst.graph) {
        return false;
    }
    for c in &src.commutativities {
        let image = match m.apply_commutativity(c) {
            Some(img) => img,
            None => return false,
        };
        if !dst.commutativities.contains(&image) {
            return false;
        }
    }
    for c in &src.convergences {
        let image = match m.apply_convergence(c) {
            Some(img) => img,
            None => return false,
        };
        if !dst
            .convergences
            .iter()
            .any(|d| conditions_equivalent(&image, d))
        {
            return false;
        }
    }
    true
}

/// Is `sub` literally contained in `sup` (same names, same endpoints,
/// every condition present)?
pub fn is_subsketch_inclusion(sub: &Sketch, sup: &Sketch) -> bool {
    for v in &sub.graph.vertices {
        if !sup.graph.has_vertex(v) {
            return false;
        }
    }
    for e in &sub.graph.edges {
        match sup.graph.edge(&e.name) {
            Some(e2) if e2.source == e.source && e2.target == e.target => {}
            _ => return false,
        }
    }
    sub.commutativities
        .iter()
        .all(|c| sup.commutativities.contains(c))
        && sub.convergences.iter().all(|c| {
            sup.convergences
                .iter()
                .any(|d| conditions_equivalent(c, d))
        })
}

/// A subsketch is regular when every condition of the ambient sketch that
/// only mentions items of the subsketch already belongs to the subsketch.
pub fn is_regular_subsketch(sub: &Sketch, sup: &Sketch) -> bool {
    if !is_subsketch_inclusion(sub, sup) {
        return false;
    }
    let verts: BTreeSet<String> = sub.graph.vertices.iter().cloned().collect();
    let edges: BTreeSet<String> = sub.graph.edges.iter().map(|e| e.name.clone()).collect();
    for c in &sup.commutativities {
        let expressible = commutativity_items(c, &sup.graph)
            .map(|items| items.is_within(&verts, &edges))
            .unwrap_or(false);
        if expressible && !sub.commutativities.contains(c) {
            return false;
        }
    }
    for c in &sup.convergences {
        let expressible = convergence_items(c, &sup.graph)
            .map(|items| items.is_within(&verts, &edges))
            .unwrap_or(false);
        if expressible
            && !sub
                .convergences
                .iter()
                .any(|d| conditions_equivalent(c, d))
        {
            return false;
        }
    }
    true
}

/// Equality of convergence conditions up to renaming the shape.
///
/// Two conditions are the same when they have the same kind and apex and
/// there is a graph isomorphism `I` between the shapes with `D' ∘ I = D`
/// and `leg(H) = leg'(I(H))` for every shape vertex `H`.
pub fn conditions_equivalent(c1: &ConvergenceCondition, c2: &ConvergenceCondition) -> bool {
    if c1.kind != c2.kind
        || c1.apex != c2.apex
        || c1.shape.vertices.len() != c2.shape.vertices.len()
        || c1.shape.edges.len() != c2.shape.edges.len()
    {
        return false;
    }
    // Candidate images for each shape vertex of c1: same diagram image,
    // same leg.
    let candidates: Vec<Vec<&String>> = c1
        .shape
        .vertices
        .iter()
        .map(|h| {
            c2.shape
                .vertices
                .iter()
                .filter(|h2| {
                    c1.diagram.vertex(h) == c2.diagram.vertex(h2)
                        && c1.legs.get(h) == c2.legs.get(h2.as_str())
                })
                .collect()
        })
        .collect();

    fn assign(
        i: usize,
        candidates: &[Vec<&String>],
        used: &mut BTreeSet<String>,
        map: &mut BTreeMap<String, String>,
        c1: &ConvergenceCondition,
        c2: &ConvergenceCondition,
    ) -> bool {
        if i == candidates.len() {
            return edge_groups_match(map, c1, c2);
        }
        let h = &c1.shape.vertices[i];
        for cand in &candidates[i] {
            if used.contains(*cand) {
                continue;
            }
            used.insert((*cand).clone());
            map.insert(h.clone(), (*cand).clone());
            if assign(i + 1, candidates, used, map, c1, c2) {
                return true;
            }
            map.remove(h);
            used.remove(*cand);
        }
        false
    }

    // Once vertices correspond, an edge bijection respecting endpoints and
    // diagram images exists iff the per-(source, target, image) counts
    // agree.
    fn edge_groups_match(
        map: &BTreeMap<String, String>,
        c1: &ConvergenceCondition,
        c2: &ConvergenceCondition,
    ) -> bool {
        let mut groups1: BTreeMap<(String, String, String), usize> = BTreeMap::new();
        for e in &c1.shape.edges {
            let src = match map.get(&e.source) {
                Some(s) => s.clone(),
                None => return false,
            };
            let tgt = match map.get(&e.target) {
                Some(t) => t.clone(),
                None => return false,
            };
            let img = match c1.diagram.edge(&e.name) {
                Some(i) => i.to_string(),
                None => return false,
            };
            *groups1.entry((src, tgt, img)).or_default() += 1;
        }
        let mut groups2: BTreeMap<(String, String, String), usize> = BTreeMap::new();
        for e in &c2.shape.edges {
            let img = match c2.diagram.edge(&e.name) {
                Some(i) => i.to_string(),
                None => return false,
            };
            *groups2.entry((e.source.clone(), e.target.clone(), img)).or_default() += 1;
        }
        groups1 == groups2
    }

    let mut used = BTreeSet::new();
    let mut map = BTreeMap::new();
    assign(0, &candidates, &mut used, &mut map, c1, c2)
}

/// The dual sketch: edges reversed (names kept), paths reversed, limits
/// and colimits exchanged with reversed shapes. An involution.
pub fn dualize_sketch(s: &Sketch) -> Sketch {
    Sketch {
        graph: s.graph.reversed(),
        commutativities: s
            .commutativities
            .iter()
            .map(|c| CommutativityCondition {
                lhs: c.lhs.reversed(&s.graph),
                rhs: c.rhs.reversed(&s.graph),
            })
            .collect(),
        convergences: s.convergences.iter().map(dualize_convergence).collect(),
    }
}

/// Limit <-> colimit with the shape reversed; diagram and legs keep their
/// names (their endpoints flip together with the ambient graph).
pub fn dualize_convergence(c: &ConvergenceCondition) -> ConvergenceCondition {
    ConvergenceCondition {
        kind: c.kind.flipped(),
        shape: c.shape.reversed(),
        diagram: c.diagram.clone(),
        apex: c.apex.clone(),
        legs: c.legs.clone(),
    }
}

/// Forget every convergence condition, keeping the graph and the
/// commutativities. Idempotent.
pub fn strip_convergence(s: &Sketch) -> Sketch {
    Sketch {
        graph: s.graph.clone(),
        commutativities: s.commutativities.clone(),
        convergences: Vec::new(),
    }
}
