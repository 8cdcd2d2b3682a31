//! Text format for documents of categories, sketches, sequents, and
//! structures.
//!
//! [`parse_document`] lexes, parses, and resolves a UTF-8 document into a
//! [`Document`]; [`serialize_document`] prints it back in canonical form
//! so that parsing the output reproduces the document structurally.
//!
//! Syntax sketch (whitespace-insensitive, `//` line comments):
//!
//! ```text
//! category Two {
//!   objects: A, B;
//!   arrow f: A -> B;
//!   compose g.f = h;          // h = g ∘ f; identities id_<object> are implicit
//! }
//!
//! sketch BIso extends AArrow {
//!   objects: ;
//!   commute g.f = id(A);      // right-to-left application: g.f is f then g
//!   limit A with (W1: f) over {
//!     nodes: W1;
//!     edge h: W1 -> W2 |-> f; // shape edge and its ambient image
//!   };
//! }
//!
//! sequent IsoSeq = XArrow |- AArrow |- BIso;
//!
//! structure F: BIso in Two {
//!   map A |-> X;
//!   map f |-> f;
//! }
//! ```
//!
//! Resolution is purely referential: names must refer to declarations
//! earlier in the document, identities and their composition laws are
//! added to categories automatically, `extends` splices the base sketch
//! in, and each convergence's diagram-on-nodes is derived from its legs
//! (a limit leg targets the node's image; a colimit leg leaves it).
//! Whether the resolved values satisfy the semantic laws (associativity,
//! path composability, cone typing, inclusion chains) is checked by the
//! validators in the other modules, not by the parser.

mod lexer;
mod parser;
mod printer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::fincat::{dualize_category, FiniteCategory};
use crate::kernel::{
    dualize_sketch, ConvergenceCondition, ConvergenceKind, Edge, Graph, GraphMorphism, Path,
    Sketch,
};
use crate::models::{dualize_structure, Structure};
use crate::sequents::{dualize_sequent, ExactnessSequent};

use parser::{RawConvergence, RawDecl, RawPath, RawSketch};

pub use printer::serialize_document;

/// 1-based source location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A reference that failed to resolve, with where it happened.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolutionError {
    pub position: Position,
    pub message: String,
}

impl fmt::Display for ResolutionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.position, self.message)
    }
}

/// Why a document was rejected: a syntax error (with the token set the
/// parser would have accepted) or the full list of resolution failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ParseError {
    Syntax {
        position: Position,
        expected: Vec<String>,
        found: String,
    },
    Resolution {
        errors: Vec<ResolutionError>,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax {
                position,
                expected,
                found,
            } => {
                write!(f, "{position}: expected {}, found {found}", expected.join(" or "))
            }
            ParseError::Resolution { errors } => {
                let lines: Vec<String> = errors.iter().map(|e| e.to_string()).collect();
                write!(f, "{}", lines.join("\n"))
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedCategory {
    pub name: String,
    pub category: FiniteCategory,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSketch {
    pub name: String,
    pub sketch: Sketch,
}

/// A sequent declaration: the resolved inclusion chain plus the names it
/// was written with (kept for serialization).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSequent {
    pub name: String,
    pub x: String,
    pub a: String,
    pub b: String,
    pub sequent: ExactnessSequent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedStructure {
    pub name: String,
    pub structure: Structure,
}

// Documents hold a handful of declarations, so the size spread between
// variants is not worth an indirection.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    Category(NamedCategory),
    Sketch(NamedSketch),
    Sequent(NamedSequent),
    Structure(NamedStructure),
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Category(c) => &c.name,
            Decl::Sketch(s) => &s.name,
            Decl::Sequent(s) => &s.name,
            Decl::Structure(s) => &s.name,
        }
    }
}

/// An ordered, fully resolved document. `extends` clauses are expanded
/// during resolution, so every sketch here is self-contained.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub decls: Vec<Decl>,
}

impl Document {
    pub fn category(&self, name: &str) -> Option<&FiniteCategory> {
        self.decls.iter().find_map(|d| match d {
            Decl::Category(c) if c.name == name => Some(&c.category),
            _ => None,
        })
    }

    pub fn sketch(&self, name: &str) -> Option<&Sketch> {
        self.decls.iter().find_map(|d| match d {
            Decl::Sketch(s) if s.name == name => Some(&s.sketch),
            _ => None,
        })
    }

    pub fn sequent(&self, name: &str) -> Option<&NamedSequent> {
        self.decls.iter().find_map(|d| match d {
            Decl::Sequent(s) if s.name == name => Some(s),
            _ => None,
        })
    }

    pub fn structure(&self, name: &str) -> Option<&NamedStructure> {
        self.decls.iter().find_map(|d| match d {
            Decl::Structure(s) if s.name == name => Some(s),
            _ => None,
        })
    }

    /// The dual document: categories and sketches are dualized in place;
    /// sequents and structures keep their references, which now point at
    /// the dualized declarations.
    pub fn dualized(&self) -> Document {
        let decls = self
            .decls
            .iter()
            .map(|d| match d {
                Decl::Category(c) => Decl::Category(NamedCategory {
                    name: c.name.clone(),
                    category: dualize_category(&c.category),
                }),
                Decl::Sketch(s) => Decl::Sketch(NamedSketch {
                    name: s.name.clone(),
                    sketch: dualize_sketch(&s.sketch),
                }),
                Decl::Sequent(s) => Decl::Sequent(NamedSequent {
                    name: s.name.clone(),
                    x: s.x.clone(),
                    a: s.a.clone(),
                    b: s.b.clone(),
                    sequent: dualize_sequent(&s.sequent),
                }),
                Decl::Structure(s) => Decl::Structure(NamedStructure {
                    name: s.name.clone(),
                    structure: dualize_structure(&s.structure),
                }),
            })
            .collect();
        Document { decls }
    }
}

/// Parse and resolve a document.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let tokens = lexer::lex(text)?;
    let raw = parser::Parser::new(tokens).document()?;
    resolve(raw)
}

struct Resolver {
    errors: Vec<ResolutionError>,
    categories: BTreeMap<String, FiniteCategory>,
    sketches: BTreeMap<String, Sketch>,
    names_by_kind: BTreeMap<&'static str, BTreeSet<String>>,
}

impl Resolver {
    fn error(&mut self, pos: Position, message: impl Into<String>) {
        self.errors.push(ResolutionError {
            position: pos,
            message: message.into(),
        });
    }

    /// Record a declaration name; duplicate names within a kind are
    /// errors.
    fn declare(&mut self, kind: &'static str, name: &parser::Name) -> bool {
        let fresh = self
            .names_by_kind
            .entry(kind)
            .or_default()
            .insert(name.text.clone());
        if !fresh {
            self.error(
                name.pos,
                format!("duplicate {kind} name `{}`", name.text),
            );
        }
        fresh
    }
}

fn resolve(raw: Vec<RawDecl>) -> Result<Document, ParseError> {
    let mut r = Resolver {
        errors: Vec::new(),
        categories: BTreeMap::new(),
        sketches: BTreeMap::new(),
        names_by_kind: BTreeMap::new(),
    };
    let mut decls = Vec::new();
    for decl in raw {
        match decl {
            RawDecl::Category(c) => {
                if !r.declare("category", &c.name) {
                    continue;
                }
                if let Some(category) = resolve_category(&mut r, &c) {
                    r.categories.insert(c.name.text.clone(), category.clone());
                    decls.push(Decl::Category(NamedCategory {
                        name: c.name.text,
                        category,
                    }));
                }
            }
            RawDecl::Sketch(s) => {
                if !r.declare("sketch", &s.name) {
                    continue;
                }
                if let Some(sketch) = resolve_sketch(&mut r, &s) {
                    r.sketches.insert(s.name.text.clone(), sketch.clone());
                    decls.push(Decl::Sketch(NamedSketch {
                        name: s.name.text,
                        sketch,
                    }));
                }
            }
            RawDecl::Sequent(s) => {
                if !r.declare("sequent", &s.name) {
                    continue;
                }
                let mut get = |n: &parser::Name| match r.sketches.get(&n.text) {
                    Some(s) => Some(s.clone()),
                    None => {
                        r.error(n.pos, format!("unknown sketch `{}`", n.text));
                        None
                    }
                };
                let (x, a, b) = (get(&s.x), get(&s.a), get(&s.b));
                if let (Some(x), Some(a), Some(b)) = (x, a, b) {
                    decls.push(Decl::Sequent(NamedSequent {
                        name: s.name.text.clone(),
                        x: s.x.text,
                        a: s.a.text,
                        b: s.b.text,
                        sequent: ExactnessSequent {
                            name: s.name.text,
                            x,
                            a,
                            b,
                        },
                    }));
                }
            }
            RawDecl::Structure(s) => {
                if !r.declare("structure", &s.name) {
                    continue;
                }
                if let Some(structure) = resolve_structure(&mut r, &s) {
                    decls.push(Decl::Structure(NamedStructure {
                        name: s.name.text,
                        structure,
                    }));
                }
            }
        }
    }
    if r.errors.is_empty() {
        Ok(Document { decls })
    } else {
        Err(ParseError::Resolution { errors: r.errors })
    }
}

fn resolve_category(r: &mut Resolver, c: &parser::RawCategory) -> Option<FiniteCategory> {
    let before = r.errors.len();
    let mut objects = Vec::new();
    let mut seen = BTreeSet::new();
    for o in &c.objects {
        if !seen.insert(o.text.clone()) {
            r.error(o.pos, format!("duplicate object `{}`", o.text));
        }
        objects.push(o.text.clone());
    }
    let mut arrows: Vec<Edge> = Vec::new();
    let mut arrow_names = BTreeSet::new();
    for a in &c.arrows {
        if a.name.text.starts_with("id_") && seen.contains(&a.name.text["id_".len()..]) {
            r.error(
                a.name.pos,
                format!("`{}` is reserved for an identity", a.name.text),
            );
        }
        if !arrow_names.insert(a.name.text.clone()) {
            r.error(a.name.pos, format!("duplicate arrow `{}`", a.name.text));
        }
        for endpoint in [&a.source, &a.target] {
            if !seen.contains(&endpoint.text) {
                r.error(endpoint.pos, format!("unknown object `{}`", endpoint.text));
            }
        }
        arrows.push(Edge::new(&a.name.text, &a.source.text, &a.target.text));
    }
    let mut identities = BTreeMap::new();
    for o in &objects {
        let id = format!("id_{o}");
        arrows.push(Edge::new(id.clone(), o.clone(), o.clone()));
        arrow_names.insert(id.clone());
        identities.insert(o.clone(), id);
    }
    if before != r.errors.len() {
        return None;
    }
    let mut composition = BTreeMap::new();
    for a in &arrows {
        composition.insert(
            (identities[&a.target].clone(), a.name.clone()),
            a.name.clone(),
        );
        composition.insert(
            (a.name.clone(), identities[&a.source].clone()),
            a.name.clone(),
        );
    }
    for comp in &c.composes {
        for n in [&comp.g, &comp.f, &comp.h] {
            if !arrow_names.contains(&n.text) {
                r.error(n.pos, format!("unknown arrow `{}`", n.text));
            }
        }
        if before != r.errors.len() {
            continue;
        }
        let key = (comp.g.text.clone(), comp.f.text.clone());
        if let Some(existing) = composition.get(&key) {
            if *existing != comp.h.text {
                r.error(
                    comp.h.pos,
                    format!(
                        "conflicting composite `{}.{}`: `{}` and `{}`",
                        comp.g.text, comp.f.text, existing, comp.h.text
                    ),
                );
            }
            continue;
        }
        composition.insert(key, comp.h.text.clone());
    }
    if before != r.errors.len() {
        return None;
    }
    Some(FiniteCategory {
        objects,
        arrows,
        identities,
        composition,
    })
}

fn resolve_sketch(r: &mut Resolver, s: &RawSketch) -> Option<Sketch> {
    let before = r.errors.len();
    let mut sketch = match &s.extends {
        Some(base) => match r.sketches.get(&base.text) {
            Some(b) => b.clone(),
            None => {
                r.error(base.pos, format!("unknown sketch `{}`", base.text));
                return None;
            }
        },
        None => Sketch::default(),
    };
    let mut vertices: BTreeSet<String> = sketch.graph.vertices.iter().cloned().collect();
    let mut edges: BTreeSet<String> = sketch.graph.edges.iter().map(|e| e.name.clone()).collect();
    for o in &s.objects {
        if !vertices.insert(o.text.clone()) {
            r.error(o.pos, format!("duplicate object `{}`", o.text));
            continue;
        }
        sketch.graph.vertices.push(o.text.clone());
    }
    for a in &s.arrows {
        if !edges.insert(a.name.text.clone()) {
            r.error(a.name.pos, format!("duplicate arrow `{}`", a.name.text));
            continue;
        }
        for endpoint in [&a.source, &a.target] {
            if !vertices.contains(&endpoint.text) {
                r.error(endpoint.pos, format!("unknown object `{}`", endpoint.text));
            }
        }
        sketch
            .graph
            .edges
            .push(Edge::new(&a.name.text, &a.source.text, &a.target.text));
    }
    if before != r.errors.len() {
        return None;
    }
    for (lhs, rhs) in &s.commutes {
        let lhs = resolve_path(r, lhs, &sketch.graph);
        let rhs = resolve_path(r, rhs, &sketch.graph);
        if let (Some(lhs), Some(rhs)) = (lhs, rhs) {
            sketch
                .commutativities
                .push(crate::kernel::CommutativityCondition { lhs, rhs });
        }
    }
    for conv in &s.convergences {
        if let Some(cond) = resolve_convergence(r, conv, &sketch.graph) {
            sketch.convergences.push(cond);
        }
    }
    if before != r.errors.len() {
        return None;
    }
    Some(sketch)
}

/// Turn a textual path into application order: `g.f` reads "f, then g",
/// so the stored edge list is the reverse of the written one and the
/// start vertex is the source of the last written name.
fn resolve_path(r: &mut Resolver, p: &RawPath, g: &Graph) -> Option<Path> {
    match p {
        RawPath::Id(at) => {
            if !g.vertices.contains(&at.text) {
                r.error(at.pos, format!("unknown object `{}`", at.text));
                return None;
            }
            Some(Path::identity(&at.text))
        }
        RawPath::Composite(names) => {
            let mut edges = Vec::new();
            for n in names.iter().rev() {
                match g.edge(&n.text) {
                    Some(_) => edges.push(n.text.clone()),
                    None => {
                        r.error(n.pos, format!("unknown arrow `{}`", n.text));
                        return None;
                    }
                }
            }
            let start = g.edge(&edges[0]).expect("just resolved").source.clone();
            Some(Path { start, edges })
        }
    }
}

fn resolve_convergence(
    r: &mut Resolver,
    c: &RawConvergence,
    ambient: &Graph,
) -> Option<ConvergenceCondition> {
    let before = r.errors.len();
    if !ambient.vertices.contains(&c.apex.text) {
        r.error(c.apex.pos, format!("unknown object `{}`", c.apex.text));
    }
    let mut nodes = BTreeSet::new();
    for n in &c.nodes {
        if !nodes.insert(n.text.clone()) {
            r.error(n.pos, format!("duplicate shape node `{}`", n.text));
        }
    }
    let mut legs = BTreeMap::new();
    let mut vertex_map = BTreeMap::new();
    for (node, arrow) in &c.legs {
        if !nodes.contains(&node.text) {
            r.error(node.pos, format!("unknown shape node `{}`", node.text));
            continue;
        }
        let edge = match ambient.edge(&arrow.text) {
            Some(e) => e,
            None => {
                r.error(arrow.pos, format!("unknown arrow `{}`", arrow.text));
                continue;
            }
        };
        if legs.insert(node.text.clone(), arrow.text.clone()).is_some() {
            r.error(node.pos, format!("second leg at shape node `{}`", node.text));
            continue;
        }
        // The diagram on nodes is determined by the legs: a limit leg
        // runs from the apex to the node's image, a colimit leg the
        // other way.
        let image = match c.kind {
            ConvergenceKind::Limit => edge.target.clone(),
            ConvergenceKind::Colimit => edge.source.clone(),
        };
        vertex_map.insert(node.text.clone(), image);
    }
    for n in &c.nodes {
        if !legs.contains_key(&n.text) {
            r.error(n.pos, format!("shape node `{}` has no leg", n.text));
        }
    }
    let mut edge_map = BTreeMap::new();
    let mut shape_edges = Vec::new();
    let mut shape_edge_names = BTreeSet::new();
    for e in &c.edges {
        if !shape_edge_names.insert(e.name.text.clone()) {
            r.error(e.name.pos, format!("duplicate shape edge `{}`", e.name.text));
            continue;
        }
        for endpoint in [&e.source, &e.target] {
            if !nodes.contains(&endpoint.text) {
                r.error(endpoint.pos, format!("unknown shape node `{}`", endpoint.text));
            }
        }
        if ambient.edge(&e.image.text).is_none() {
            r.error(e.image.pos, format!("unknown arrow `{}`", e.image.text));
        }
        shape_edges.push(Edge::new(&e.name.text, &e.source.text, &e.target.text));
        edge_map.insert(e.name.text.clone(), e.image.text.clone());
    }
    if before != r.errors.len() {
        return None;
    }
    Some(ConvergenceCondition {
        kind: c.kind,
        shape: Graph {
            vertices: c.nodes.iter().map(|n| n.text.clone()).collect(),
            edges: shape_edges,
        },
        diagram: GraphMorphism {
            vertex_map,
            edge_map,
        },
        apex: c.apex.text.clone(),
        legs,
    })
}

fn resolve_structure(r: &mut Resolver, s: &parser::RawStructure) -> Option<Structure> {
    let before = r.errors.len();
    let sketch = match r.sketches.get(&s.sketch.text) {
        Some(sk) => sk.clone(),
        None => {
            r.error(s.sketch.pos, format!("unknown sketch `{}`", s.sketch.text));
            return None;
        }
    };
    let category = match r.categories.get(&s.category.text) {
        Some(c) => c.clone(),
        None => {
            r.error(
                s.category.pos,
                format!("unknown category `{}`", s.category.text),
            );
            return None;
        }
    };
    let mut vertex_map = BTreeMap::new();
    let mut edge_map = BTreeMap::new();
    for (from, to) in &s.maps {
        if sketch.graph.vertices.contains(&from.text) {
            if !category.has_object(&to.text) {
                r.error(to.pos, format!("unknown object `{}`", to.text));
                continue;
            }
            if vertex_map.insert(from.text.clone(), to.text.clone()).is_some() {
                r.error(from.pos, format!("`{}` is mapped twice", from.text));
            }
        } else if sketch.graph.edge(&from.text).is_some() {
            if category.arrow(&to.text).is_none() {
                r.error(to.pos, format!("unknown arrow `{}`", to.text));
                continue;
            }
            if edge_map.insert(from.text.clone(), to.text.clone()).is_some() {
                r.error(from.pos, format!("`{}` is mapped twice", from.text));
            }
        } else {
            r.error(
                from.pos,
                format!("`{}` is not an item of sketch `{}`", from.text, s.sketch.text),
            );
        }
    }
    if before != r.errors.len() {
        return None;
    }
    Some(Structure {
        sketch: s.sketch.text.clone(),
        category: s.category.text.clone(),
        vertex_map,
        edge_map,
    })
}
