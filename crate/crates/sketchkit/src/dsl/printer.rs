//! Canonical serializer: the inverse of parsing up to formatting.
//!
//! Identities and their composition laws are left implicit in category
//! bodies (the parser restores them), paths are printed right-to-left
//! with `.`, and section order is fixed, so serialization is a canonical
//! form: parsing the output reproduces the document and serializing again
//! reproduces the text.

use std::fmt::Write as _;

use crate::fincat::FiniteCategory;
use crate::kernel::{ConvergenceCondition, ConvergenceKind, Path, Sketch};

use super::{Decl, Document, NamedSequent, NamedStructure};

fn path_text(p: &Path) -> String {
    if p.edges.is_empty() {
        format!("id({})", p.start)
    } else {
        let mut names: Vec<&str> = p.edges.iter().map(|s| s.as_str()).collect();
        names.reverse();
        names.join(".")
    }
}

fn names_line(out: &mut String, label: &str, names: &[String]) {
    if names.is_empty() {
        let _ = writeln!(out, "  {label}: ;");
    } else {
        let _ = writeln!(out, "  {label}: {};", names.join(", "));
    }
}

fn category_text(out: &mut String, name: &str, c: &FiniteCategory) {
    let _ = writeln!(out, "category {name} {{");
    names_line(out, "objects", &c.objects);
    let identity_names: std::collections::BTreeSet<&String> = c.identities.values().collect();
    for a in &c.arrows {
        if identity_names.contains(&a.name) {
            continue;
        }
        let _ = writeln!(out, "  arrow {}: {} -> {};", a.name, a.source, a.target);
    }
    for ((g, f), h) in &c.composition {
        if identity_names.contains(g) || identity_names.contains(f) {
            continue;
        }
        let _ = writeln!(out, "  compose {g}.{f} = {h};");
    }
    let _ = writeln!(out, "}}");
}

fn convergence_text(out: &mut String, c: &ConvergenceCondition) {
    let kind = match c.kind {
        ConvergenceKind::Limit => "limit",
        ConvergenceKind::Colimit => "colimit",
    };
    let legs: Vec<String> = c
        .shape
        .vertices
        .iter()
        .filter_map(|h| c.legs.get(h).map(|leg| format!("{h}: {leg}")))
        .collect();
    let _ = writeln!(out, "  {kind} {} with ({}) over {{", c.apex, legs.join(", "));
    if c.shape.vertices.is_empty() {
        let _ = writeln!(out, "    nodes: ;");
    } else {
        let _ = writeln!(out, "    nodes: {};", c.shape.vertices.join(", "));
    }
    for e in &c.shape.edges {
        let image = c.diagram.edge(&e.name).unwrap_or("?");
        let _ = writeln!(
            out,
            "    edge {}: {} -> {} |-> {};",
            e.name, e.source, e.target, image
        );
    }
    let _ = writeln!(out, "  }};");
}

fn sketch_text(out: &mut String, name: &str, s: &Sketch) {
    let _ = writeln!(out, "sketch {name} {{");
    names_line(out, "objects", &s.graph.vertices);
    for a in &s.graph.edges {
        let _ = writeln!(out, "  arrow {}: {} -> {};", a.name, a.source, a.target);
    }
    for c in &s.commutativities {
        let _ = writeln!(out, "  commute {} = {};", path_text(&c.lhs), path_text(&c.rhs));
    }
    for c in &s.convergences {
        convergence_text(out, c);
    }
    let _ = writeln!(out, "}}");
}

fn sequent_text(out: &mut String, s: &NamedSequent) {
    let _ = writeln!(out, "sequent {} = {} |- {} |- {};", s.name, s.x, s.a, s.b);
}

fn structure_text(out: &mut String, s: &NamedStructure) {
    let _ = writeln!(
        out,
        "structure {}: {} in {} {{",
        s.name, s.structure.sketch, s.structure.category
    );
    for (from, to) in &s.structure.vertex_map {
        let _ = writeln!(out, "  map {from} |-> {to};");
    }
    for (from, to) in &s.structure.edge_map {
        let _ = writeln!(out, "  map {from} |-> {to};");
    }
    let _ = writeln!(out, "}}");
}

/// Print a document in canonical form; see the module docs for the
/// guarantees.
pub fn serialize_document(d: &Document) -> String {
    let mut out = String::new();
    for (i, decl) in d.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match decl {
            Decl::Category(c) => category_text(&mut out, &c.name, &c.category),
            Decl::Sketch(s) => sketch_text(&mut out, &s.name, &s.sketch),
            Decl::Sequent(s) => sequent_text(&mut out, s),
            Decl::Structure(s) => structure_text(&mut out, s),
        }
    }
    out
}
