//! Shared fixtures for unit tests: small categories and sketches built
//! programmatically (independently of the text format).

use std::collections::BTreeMap;

use crate::fincat::{Diagram, FiniteCategory};
use crate::kernel::{
    CommutativityCondition, ConvergenceCondition, ConvergenceKind, Edge, Graph, GraphMorphism,
    Path, Sketch,
};

pub fn graph(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Graph {
    Graph {
        vertices: vertices.iter().map(|s| s.to_string()).collect(),
        edges: edges
            .iter()
            .map(|(n, s, t)| Edge::new(*n, *s, *t))
            .collect(),
    }
}

pub fn path(start: &str, edges: &[&str]) -> Path {
    Path {
        start: start.to_string(),
        edges: edges.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn commute(lhs: Path, rhs: Path) -> CommutativityCondition {
    CommutativityCondition { lhs, rhs }
}

pub fn btree(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

pub fn morphism(vertices: &[(&str, &str)], edges: &[(&str, &str)]) -> GraphMorphism {
    GraphMorphism {
        vertex_map: btree(vertices),
        edge_map: btree(edges),
    }
}

pub fn conv(
    kind: ConvergenceKind,
    apex: &str,
    shape: Graph,
    diagram_vertices: &[(&str, &str)],
    diagram_edges: &[(&str, &str)],
    legs: &[(&str, &str)],
) -> ConvergenceCondition {
    ConvergenceCondition {
        kind,
        shape,
        diagram: morphism(diagram_vertices, diagram_edges),
        apex: apex.to_string(),
        legs: btree(legs),
    }
}

/// Build a category from non-identity arrows and non-identity composites;
/// identities are added as `id_<object>` together with the identity laws.
/// `composes` entries read `(g, f, g_after_f)`.
pub fn category(
    objects: &[&str],
    arrows: &[(&str, &str, &str)],
    composes: &[(&str, &str, &str)],
) -> FiniteCategory {
    let mut all_arrows: Vec<Edge> = arrows
        .iter()
        .map(|(n, s, t)| Edge::new(*n, *s, *t))
        .collect();
    let mut identities = BTreeMap::new();
    for o in objects {
        let id = format!("id_{o}");
        all_arrows.push(Edge::new(id.clone(), *o, *o));
        identities.insert(o.to_string(), id);
    }
    let mut composition = BTreeMap::new();
    for a in &all_arrows {
        composition.insert(
            (identities[&a.target].clone(), a.name.clone()),
            a.name.clone(),
        );
        composition.insert(
            (a.name.clone(), identities[&a.source].clone()),
            a.name.clone(),
        );
    }
    for (g, f, gf) in composes {
        composition.insert((g.to_string(), f.to_string()), gf.to_string());
    }
    FiniteCategory {
        objects: objects.iter().map(|s| s.to_string()).collect(),
        arrows: all_arrows,
        identities,
        composition,
    }
}

/// The terminal category: one object, its identity.
pub fn cat_one() -> FiniteCategory {
    category(&["A"], &[], &[])
}

/// The walking arrow.
pub fn cat_two() -> FiniteCategory {
    category(&["A", "B"], &[("f", "A", "B")], &[])
}

/// Two objects with an isomorphism between them.
pub fn cat_iso2() -> FiniteCategory {
    category(
        &["X", "Y"],
        &[("f", "X", "Y"), ("g", "Y", "X")],
        &[("g", "f", "id_X"), ("f", "g", "id_Y")],
    )
}

/// A parallel pair `g1, g2 : P -> X` merged by `h : X -> Y`; the witness
/// that `h` is not a monomorphism.
pub fn cat_parfork() -> FiniteCategory {
    category(
        &["P", "X", "Y"],
        &[
            ("g1", "P", "X"),
            ("g2", "P", "X"),
            ("h", "X", "Y"),
            ("k", "P", "Y"),
        ],
        &[("h", "g1", "k"), ("h", "g2", "k")],
    )
}

/// The four-element boolean poset `0 < a, b < 1` as a category: every pair
/// has a meet and a join.
pub fn cat_b2() -> FiniteCategory {
    category(
        &["0", "a", "b", "1"],
        &[
            ("x0a", "0", "a"),
            ("x0b", "0", "b"),
            ("xa1", "a", "1"),
            ("xb1", "b", "1"),
            ("x01", "0", "1"),
        ],
        &[("xa1", "x0a", "x01"), ("xb1", "x0b", "x01")],
    )
}

/// The poset `a < t > b`: the pair `{a, b}` has an upper bound but no
/// lower bound, so no meet.
pub fn cat_vee() -> FiniteCategory {
    category(&["a", "t", "b"], &[("fat", "a", "t"), ("fbt", "b", "t")], &[])
}

pub fn sample_categories() -> Vec<(&'static str, FiniteCategory)> {
    vec![
        ("One", cat_one()),
        ("Two", cat_two()),
        ("Iso2", cat_iso2()),
        ("ParFork", cat_parfork()),
        ("B2", cat_b2()),
        ("Vee", cat_vee()),
    ]
}

/// Vertices `A, B` and a single edge `f`, no conditions.
pub fn sketch_bare_arrow() -> Sketch {
    Sketch {
        graph: graph(&["A", "B"], &[("f", "A", "B")]),
        ..Default::default()
    }
}

/// The underlying sketch of the walking arrow (identities named `id_A`,
/// `id_B`).
pub fn sketch_arrow() -> Sketch {
    crate::fincat::underlying_sketch(&cat_two())
}

/// A one-vertex limit cone `(A, (f))` over `B`: holds exactly when the
/// interpretation of `f` is an isomorphism.
pub fn iso_condition() -> ConvergenceCondition {
    conv(
        ConvergenceKind::Limit,
        "A",
        graph(&["W1"], &[]),
        &[("W1", "B")],
        &[],
        &[("W1", "f")],
    )
}

/// [`sketch_arrow`] plus the isomorphism condition on `f`.
pub fn sketch_iso() -> Sketch {
    let mut s = sketch_arrow();
    s.convergences.push(iso_condition());
    s
}

/// Kernel-pair condition `(A, (id_A, id_A, f)) = lim` over the cospan
/// `A -f-> B <-f- A`: holds exactly when `f` is a monomorphism.
pub fn mono_condition() -> ConvergenceCondition {
    conv(
        ConvergenceKind::Limit,
        "A",
        graph(&["W1", "W2", "W3"], &[("w1", "W1", "W3"), ("w2", "W2", "W3")]),
        &[("W1", "A"), ("W2", "A"), ("W3", "B")],
        &[("w1", "f"), ("w2", "f")],
        &[("W1", "id_A"), ("W2", "id_A"), ("W3", "f")],
    )
}

/// [`sketch_arrow`] plus the kernel-pair condition on `f`.
pub fn sketch_mono() -> Sketch {
    let mut s = sketch_arrow();
    s.convergences.push(mono_condition());
    s
}

/// Two isolated vertices `X, Y`, no conditions.
pub fn sketch_discrete2() -> Sketch {
    Sketch {
        graph: graph(&["X", "Y"], &[]),
        ..Default::default()
    }
}

/// [`sketch_discrete2`] plus an apex `P` with projections required to be a
/// product.
pub fn sketch_product() -> Sketch {
    Sketch {
        graph: graph(
            &["X", "Y", "P"],
            &[("p1", "P", "X"), ("p2", "P", "Y")],
        ),
        commutativities: vec![],
        convergences: vec![conv(
            ConvergenceKind::Limit,
            "P",
            graph(&["W1", "W2"], &[]),
            &[("W1", "X"), ("W2", "Y")],
            &[],
            &[("W1", "p1"), ("W2", "p2")],
        )],
    }
}

/// The parallel pair `r1, r2 : R -> X`, freely generated.
pub fn cat_rel() -> FiniteCategory {
    category(&["R", "X"], &[("r1", "R", "X"), ("r2", "R", "X")], &[])
}

/// Joint monomorphy of the span `(r1, r2)` as a limit: apex `R`, legs
/// `(r1, id_R, id_R, r2)` over the square whose two middle vertices map to
/// `R` and project to both copies of `X` via `r1`/`r2`. A cone over the
/// diagram is a pair `u2, u3 : V -> R` with `r1∘u2 = r1∘u3` and
/// `r2∘u2 = r2∘u3`; the cone is limiting exactly when such a pair is
/// forced equal.
pub fn relation_condition() -> ConvergenceCondition {
    conv(
        ConvergenceKind::Limit,
        "R",
        graph(
            &["K1", "K2", "K3", "K4"],
            &[
                ("e21", "K2", "K1"),
                ("e24", "K2", "K4"),
                ("e31", "K3", "K1"),
                ("e34", "K3", "K4"),
            ],
        ),
        &[("K1", "X"), ("K2", "R"), ("K3", "R"), ("K4", "X")],
        &[("e21", "r1"), ("e24", "r2"), ("e31", "r1"), ("e34", "r2")],
        &[("K1", "r1"), ("K2", "id_R"), ("K3", "id_R"), ("K4", "r2")],
    )
}

/// The sketch of a relation: the underlying sketch of [`cat_rel`] plus
/// [`relation_condition`].
pub fn sketch_relation() -> Sketch {
    let mut s = crate::fincat::underlying_sketch(&cat_rel());
    s.convergences.push(relation_condition());
    s
}

/// [`sketch_relation`] plus a diagonal `e : X -> R` with `r1∘e` and
/// `r2∘e` equal to the empty path at `X`.
pub fn sketch_refl1() -> Sketch {
    let mut s = sketch_relation();
    s.graph.edges.push(Edge::new("e", "X", "R"));
    s.commutativities.push(commute(
        path("X", &["e", "r1"]),
        Path::identity("X"),
    ));
    s.commutativities.push(commute(
        path("X", &["e", "r2"]),
        Path::identity("X"),
    ));
    s
}

/// [`sketch_relation`] plus the equalizer `(L, (l, dg))` of `r1, r2` and
/// the requirement that `dg : L -> X` be an isomorphism.
pub fn sketch_refl2() -> Sketch {
    let mut s = sketch_relation();
    s.graph.vertices.push("L".to_string());
    s.graph.edges.push(Edge::new("l", "L", "R"));
    s.graph.edges.push(Edge::new("dg", "L", "X"));
    s.convergences.push(conv(
        ConvergenceKind::Limit,
        "L",
        graph(&["W1", "W2"], &[("w1", "W1", "W2"), ("w2", "W1", "W2")]),
        &[("W1", "R"), ("W2", "X")],
        &[("w1", "r1"), ("w2", "r2")],
        &[("W1", "l"), ("W2", "dg")],
    ));
    s.convergences.push(conv(
        ConvergenceKind::Limit,
        "L",
        graph(&["W1"], &[]),
        &[("W1", "X")],
        &[],
        &[("W1", "dg")],
    ));
    s
}

/// Epimorphy of `f` as a colimit: the dual of the kernel-pair condition.
pub fn epi_condition() -> ConvergenceCondition {
    conv(
        ConvergenceKind::Colimit,
        "B",
        graph(&["W1", "W2", "W3"], &[("w1", "W3", "W1"), ("w2", "W3", "W2")]),
        &[("W1", "B"), ("W2", "B"), ("W3", "A")],
        &[("w1", "f"), ("w2", "f")],
        &[("W1", "id_B"), ("W2", "id_B"), ("W3", "f")],
    )
}

/// [`sketch_arrow`] plus [`epi_condition`].
pub fn sketch_epi() -> Sketch {
    let mut s = sketch_arrow();
    s.convergences.push(epi_condition());
    s
}

/// [`sketch_epi`] plus a section `s : B -> A` of `f`.
pub fn sketch_split_epi() -> Sketch {
    let mut s = sketch_epi();
    s.graph.edges.push(Edge::new("s", "B", "A"));
    s.commutativities.push(commute(
        path("B", &["s", "f"]),
        Path::identity("B"),
    ));
    s
}

/// A diagram over the discrete shape `W1, ..., Wn` picking out the given
/// objects.
pub fn discrete_diagram(objects: &[&str]) -> Diagram {
    let names: Vec<String> = (1..=objects.len()).map(|i| format!("W{i}")).collect();
    Diagram {
        shape: Graph {
            vertices: names.clone(),
            edges: vec![],
        },
        map: GraphMorphism {
            vertex_map: names
                .iter()
                .zip(objects)
                .map(|(w, o)| (w.clone(), o.to_string()))
                .collect(),
            edge_map: BTreeMap::new(),
        },
    }
}
