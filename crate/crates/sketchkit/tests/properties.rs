//! Property-based and oracle-equivalence tests.
//!
//! The generator below builds documents the same way the resolver would
//! (identities appended after declared arrows, unit composites present,
//! diagrams derived from legs), so the canonical printer must round-trip
//! them exactly. The enumeration and fibre tests re-derive every answer
//! by raw search over all graph maps — with none of the library's hom-set
//! pruning — and require set equality.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sketchkit::dsl::{
    parse_document, serialize_document, Decl, Document, NamedCategory, NamedSequent, NamedSketch,
    NamedStructure, ParseError,
};
use sketchkit::fincat::FiniteCategory;
use sketchkit::kernel::{
    CommutativityCondition, ConvergenceCondition, ConvergenceKind, Edge, Graph, GraphMorphism,
    Path, Sketch,
};
use sketchkit::models::{
    compose_transformations, enumerate_structures, enumerate_transformations, fibre,
    identity_transformation, restrict_structure, validate_structure, NatTransformation, Structure,
};
use sketchkit::sequents::{
    dualize_sequent, is_unconditional_finite_kind, validate_sequent, ExactnessSequent,
};
use sketchkit::Budget;

// ---------------------------------------------------------------------
// Deterministic fixture: small categories, sketches, and sequents kept
// tiny enough for exhaustive raw search.
// ---------------------------------------------------------------------

/// A walking arrow, a walking isomorphism pair, and a fork whose parallel
/// pair is merged by precomposition; two inclusion chains over them.
const FIXTURE: &str = r#"
category Walk {
  objects: X, Y;
  arrow u: X -> Y;
}

category Flip {
  objects: P, Q;
  arrow s: P -> Q;
  arrow t: Q -> P;
  compose t.s = id_P;
  compose s.t = id_Q;
}

category Fork {
  objects: C0, C1, C2;
  arrow m: C0 -> C1;
  arrow p: C1 -> C2;
  arrow q: C1 -> C2;
  arrow w: C0 -> C2;
  compose p.m = w;
  compose q.m = w;
}

sketch SArrow {
  objects: V0, V1;
  arrow d: V0 -> V1;
}

sketch SPair extends SArrow {
  objects: ;
  arrow d2: V0 -> V1;
}

sketch SGlued extends SPair {
  objects: ;
  commute d = d2;
}

sketch SSpan {
  objects: P0, P1, P2;
  arrow r1: P0 -> P1;
  arrow r2: P0 -> P2;
}

sketch SProd extends SSpan {
  objects: ;
  limit P0 with (n1: r1, n2: r2) over { nodes: n1, n2; };
}

sequent TPair = SArrow |- SArrow |- SPair;
sequent TGlued = SArrow |- SPair |- SGlued;
sequent TProd = SSpan |- SSpan |- SProd;
"#;

fn fixture() -> Document {
    parse_document(FIXTURE).expect("fixture parses")
}

fn fixture_categories(doc: &Document) -> Vec<(&str, &FiniteCategory)> {
    doc.decls
        .iter()
        .filter_map(|d| match d {
            Decl::Category(c) => Some((c.name.as_str(), &c.category)),
            _ => None,
        })
        .collect()
}

fn fixture_sketches(doc: &Document) -> Vec<(&str, &Sketch)> {
    doc.decls
        .iter()
        .filter_map(|d| match d {
            Decl::Sketch(s) => Some((s.name.as_str(), &s.sketch)),
            _ => None,
        })
        .collect()
}

fn fixture_sequents(doc: &Document) -> Vec<&ExactnessSequent> {
    doc.decls
        .iter()
        .filter_map(|d| match d {
            Decl::Sequent(s) => Some(&s.sequent),
            _ => None,
        })
        .collect()
}

// ---------------------------------------------------------------------
// Raw-search oracles.
// ---------------------------------------------------------------------

/// Advance a mixed-radix odometer; false when it wraps to all zeros.
fn bump(idx: &mut [usize], base: usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < base {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Every total graph map from the sketch into the category — all
/// |objects|^|vertices| * |arrows|^|edges| of them, with no typing or
/// hom-set pruning — filtered by full validation.
fn raw_enumerate(s: &Sketch, c: &FiniteCategory) -> Vec<Structure> {
    let nv = s.graph.vertices.len();
    let ne = s.graph.edges.len();
    if (nv > 0 && c.objects.is_empty()) || (ne > 0 && c.arrows.is_empty()) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut vi = vec![0usize; nv];
    loop {
        let mut ei = vec![0usize; ne];
        loop {
            let mut st = Structure::default();
            for (v, i) in s.graph.vertices.iter().zip(&vi) {
                st.vertex_map.insert(v.clone(), c.objects[*i].clone());
            }
            for (e, i) in s.graph.edges.iter().zip(&ei) {
                st.edge_map.insert(e.name.clone(), c.arrows[*i].name.clone());
            }
            if validate_structure(&st, s, c).is_valid() {
                out.push(st);
            }
            if !bump(&mut ei, c.arrows.len()) {
                break;
            }
        }
        if !bump(&mut vi, c.objects.len()) {
            break;
        }
    }
    out
}

type Interp = (BTreeMap<String, String>, BTreeMap<String, String>);

fn interp_set(v: &[Structure]) -> BTreeSet<Interp> {
    v.iter()
        .map(|s| (s.vertex_map.clone(), s.edge_map.clone()))
        .collect()
}

/// Candidate count of the raw search, or None on overflow.
fn raw_size(s: &Sketch, c: &FiniteCategory) -> Option<u128> {
    let pow = |base: usize, exp: usize| -> Option<u128> {
        (base as u128).checked_pow(u32::try_from(exp).ok()?)
    };
    let v = pow(c.objects.len().max(1), s.graph.vertices.len())?;
    let e = pow(c.arrows.len().max(1), s.graph.edges.len())?;
    v.checked_mul(e)
}

/// Library enumeration must equal the raw search exactly, with no
/// duplicates and every output valid.
fn check_enumeration_against_raw(s: &Sketch, c: &FiniteCategory) {
    let raw = raw_enumerate(s, c);
    let lib = enumerate_structures(s, c, Budget::default()).expect("enumeration within budget");
    for st in &lib {
        assert!(
            validate_structure(st, s, c).is_valid(),
            "enumeration emitted an invalid structure"
        );
    }
    let lib_set = interp_set(&lib);
    assert_eq!(lib_set.len(), lib.len(), "enumeration emitted duplicates");
    assert_eq!(lib_set, interp_set(&raw), "enumeration disagrees with raw search");
}

/// The fibre must equal the filter of the full enumeration by strict
/// restriction equality.
fn check_fibre_against_filter(
    m: &GraphMorphism,
    src: &Sketch,
    dst: &Sketch,
    c: &FiniteCategory,
    g: &Structure,
) {
    let actual = fibre(m, src, dst, c, g, Budget::default()).expect("fibre within budget");
    let expected: Vec<Structure> = enumerate_structures(dst, c, Budget::default())
        .expect("enumeration within budget")
        .into_iter()
        .filter(|h| {
            restrict_structure(h, m)
                .map(|r| r.same_interpretation(g))
                .unwrap_or(false)
        })
        .collect();
    assert_eq!(
        interp_set(&actual),
        interp_set(&expected),
        "fibre disagrees with filtered enumeration"
    );
    assert_eq!(actual.len(), expected.len(), "fibre emitted duplicates");
}

// ---------------------------------------------------------------------
// Fixture-driven oracle equivalences.
// ---------------------------------------------------------------------

#[test]
fn fixture_round_trips() {
    let doc = fixture();
    let text = serialize_document(&doc);
    let reparsed = parse_document(&text).expect("serialized fixture reparses");
    assert_eq!(reparsed, doc);
    assert_eq!(serialize_document(&reparsed), text);
}

#[test]
fn enumeration_matches_raw_search_on_fixture() {
    let doc = fixture();
    let mut pairs = 0usize;
    for (_, s) in fixture_sketches(&doc) {
        for (_, c) in fixture_categories(&doc) {
            check_enumeration_against_raw(s, c);
            pairs += 1;
        }
    }
    assert_eq!(pairs, 15);
}

#[test]
fn fibre_matches_filtered_enumeration_on_fixture() {
    let doc = fixture();
    let mut bases = 0usize;
    for seq in fixture_sequents(&doc) {
        for (_, c) in fixture_categories(&doc) {
            for g in enumerate_structures(&seq.a, c, Budget::default()).unwrap() {
                check_fibre_against_filter(&seq.beta(), &seq.a, &seq.b, c, &g);
                bases += 1;
            }
            for f in enumerate_structures(&seq.x, c, Budget::default()).unwrap() {
                check_fibre_against_filter(&seq.alpha(), &seq.x, &seq.a, c, &f);
                bases += 1;
            }
        }
    }
    assert!(bases > 50, "fixture produced only {bases} fibre bases");
}

/// Composition of natural transformations is associative and has the
/// identity transformation as a two-sided unit — checked exhaustively on
/// every composable chain the fixture admits.
#[test]
fn transformation_composition_laws_on_fixture() {
    let doc = fixture();
    let sketches = ["SArrow", "SPair", "SGlued"];
    let mut identity_checks = 0usize;
    let mut associativity_checks = 0usize;
    for sname in sketches {
        let s = doc.sketch(sname).expect("fixture sketch");
        for (_, c) in fixture_categories(&doc) {
            let structures = enumerate_structures(s, c, Budget::default()).unwrap();
            let n = structures.len();
            let mut homs: BTreeMap<(usize, usize), Vec<NatTransformation>> = BTreeMap::new();
            for (i, f) in structures.iter().enumerate() {
                for (j, g) in structures.iter().enumerate() {
                    let ts = enumerate_transformations(f, g, s, c, Budget::default()).unwrap();
                    homs.insert((i, j), ts);
                }
            }
            for (i, f) in structures.iter().enumerate() {
                let id_f = identity_transformation(f, s, c);
                for j in 0..n {
                    for t in &homs[&(i, j)] {
                        let right = compose_transformations(t, &id_f, c)
                            .expect("unit composite exists");
                        assert_eq!(right.components, t.components, "right identity law");
                        identity_checks += 1;
                    }
                    let id_g = identity_transformation(&structures[j], s, c);
                    for t in &homs[&(i, j)] {
                        let left = compose_transformations(&id_g, t, c)
                            .expect("unit composite exists");
                        assert_eq!(left.components, t.components, "left identity law");
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    if homs[&(i, j)].is_empty() {
                        continue;
                    }
                    for k in 0..n {
                        if homs[&(j, k)].is_empty() {
                            continue;
                        }
                        for l in 0..n {
                            for t1 in &homs[&(i, j)] {
                                for t2 in &homs[&(j, k)] {
                                    for t3 in &homs[&(k, l)] {
                                        let inner = compose_transformations(t2, t1, c)
                                            .expect("composable");
                                        let outer = compose_transformations(t3, t2, c)
                                            .expect("composable");
                                        let lhs = compose_transformations(t3, &inner, c)
                                            .expect("composable");
                                        let rhs = compose_transformations(&outer, t1, c)
                                            .expect("composable");
                                        assert_eq!(
                                            lhs.components, rhs.components,
                                            "associativity"
                                        );
                                        associativity_checks += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(identity_checks > 100, "only {identity_checks} identity checks ran");
    assert!(
        associativity_checks > 100,
        "only {associativity_checks} associativity checks ran"
    );
}

#[test]
fn duality_preserves_unconditionality_on_fixture() {
    let doc = fixture();
    let mut checked = 0usize;
    for seq in fixture_sequents(&doc) {
        assert!(validate_sequent(seq).is_valid());
        let direct = is_unconditional_finite_kind(seq);
        let dual = is_unconditional_finite_kind(&dualize_sequent(seq));
        assert_eq!(direct, dual, "duality changed unconditionality of {}", seq.name);
        checked += 1;
    }
    assert_eq!(checked, 3);
}

// ---------------------------------------------------------------------
// Random well-formed documents.
// ---------------------------------------------------------------------

/// Build a random document the same way the resolver would, so that the
/// canonical printer round-trips it exactly: identities appended after
/// the declared arrows, unit composites present, diagrams derived from
/// the legs.
fn random_document(rng: &mut StdRng) -> Document {
    let mut decls = Vec::new();
    let mut categories: Vec<(String, FiniteCategory)> = Vec::new();
    let mut sketches: Vec<(String, Sketch)> = Vec::new();

    let n_categories = rng.gen_range(1..=2);
    for ci in 0..n_categories {
        let name = format!("c{ci}");
        let n_objects = rng.gen_range(1..=4);
        let objects: Vec<String> = (0..n_objects).map(|i| format!("q{ci}_{i}")).collect();
        let mut arrows = Vec::new();
        for ai in 0..rng.gen_range(0..=5) {
            let src = &objects[rng.gen_range(0..objects.len())];
            let tgt = &objects[rng.gen_range(0..objects.len())];
            arrows.push(Edge::new(format!("a{ci}_{ai}"), src.clone(), tgt.clone()));
        }
        let declared = arrows.clone();
        let mut identities = BTreeMap::new();
        for o in &objects {
            let id = format!("id_{o}");
            arrows.push(Edge::new(id.clone(), o.clone(), o.clone()));
            identities.insert(o.clone(), id);
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
        if !declared.is_empty() {
            for _ in 0..rng.gen_range(0..=4) {
                let g = &declared[rng.gen_range(0..declared.len())].name;
                let f = &declared[rng.gen_range(0..declared.len())].name;
                let h = &arrows[rng.gen_range(0..arrows.len())].name;
                composition
                    .entry((g.clone(), f.clone()))
                    .or_insert_with(|| h.clone());
            }
        }
        let category = FiniteCategory {
            objects,
            arrows,
            identities,
            composition,
        };
        categories.push((name.clone(), category.clone()));
        decls.push(Decl::Category(NamedCategory { name, category }));
    }

    let n_sketches = rng.gen_range(1..=3);
    for si in 0..n_sketches {
        let name = format!("s{si}");
        let n_vertices = rng.gen_range(0..=4);
        let vertices: Vec<String> = (0..n_vertices).map(|i| format!("v{si}_{i}")).collect();
        let mut edges = Vec::new();
        if !vertices.is_empty() {
            for ei in 0..rng.gen_range(0..=5) {
                let src = &vertices[rng.gen_range(0..vertices.len())];
                let tgt = &vertices[rng.gen_range(0..vertices.len())];
                edges.push(Edge::new(format!("e{si}_{ei}"), src.clone(), tgt.clone()));
            }
        }
        let graph = Graph {
            vertices: vertices.clone(),
            edges: edges.clone(),
        };
        let random_path = |rng: &mut StdRng| {
            if edges.is_empty() || rng.gen_bool(0.4) {
                Path::identity(vertices[rng.gen_range(0..vertices.len())].clone())
            } else {
                let chosen: Vec<String> = (0..rng.gen_range(1..=3))
                    .map(|_| edges[rng.gen_range(0..edges.len())].name.clone())
                    .collect();
                let start = graph.edge(&chosen[0]).expect("edge exists").source.clone();
                Path {
                    start,
                    edges: chosen,
                }
            }
        };
        let mut commutativities = Vec::new();
        if !vertices.is_empty() {
            for _ in 0..rng.gen_range(0..=3) {
                commutativities.push(CommutativityCondition {
                    lhs: random_path(rng),
                    rhs: random_path(rng),
                });
            }
        }
        let mut convergences = Vec::new();
        if !vertices.is_empty() {
            for ki in 0..rng.gen_range(0..=2) {
                let kind = if rng.gen_bool(0.5) {
                    ConvergenceKind::Limit
                } else {
                    ConvergenceKind::Colimit
                };
                let n_nodes = if edges.is_empty() { 0 } else { rng.gen_range(0..=3) };
                let nodes: Vec<String> = (0..n_nodes).map(|i| format!("n{ki}_{i}")).collect();
                let mut legs = BTreeMap::new();
                let mut vertex_map = BTreeMap::new();
                for node in &nodes {
                    let leg = &edges[rng.gen_range(0..edges.len())];
                    legs.insert(node.clone(), leg.name.clone());
                    let image = match kind {
                        ConvergenceKind::Limit => leg.target.clone(),
                        ConvergenceKind::Colimit => leg.source.clone(),
                    };
                    vertex_map.insert(node.clone(), image);
                }
                let mut shape_edges = Vec::new();
                let mut edge_map = BTreeMap::new();
                if !nodes.is_empty() && !edges.is_empty() {
                    for wi in 0..rng.gen_range(0..=3) {
                        let shape_name = format!("w{ki}_{wi}");
                        let src = &nodes[rng.gen_range(0..nodes.len())];
                        let tgt = &nodes[rng.gen_range(0..nodes.len())];
                        shape_edges.push(Edge::new(shape_name.clone(), src.clone(), tgt.clone()));
                        edge_map.insert(
                            shape_name,
                            edges[rng.gen_range(0..edges.len())].name.clone(),
                        );
                    }
                }
                convergences.push(ConvergenceCondition {
                    kind,
                    shape: Graph {
                        vertices: nodes,
                        edges: shape_edges,
                    },
                    diagram: GraphMorphism {
                        vertex_map,
                        edge_map,
                    },
                    apex: vertices[rng.gen_range(0..vertices.len())].clone(),
                    legs,
                });
            }
        }
        let sketch = Sketch {
            graph,
            commutativities,
            convergences,
        };
        sketches.push((name.clone(), sketch.clone()));
        decls.push(Decl::Sketch(NamedSketch { name, sketch }));
    }

    for qi in 0..rng.gen_range(0..=2) {
        let (xn, xs) = &sketches[rng.gen_range(0..sketches.len())];
        let (an, as_) = &sketches[rng.gen_range(0..sketches.len())];
        let (bn, bs) = &sketches[rng.gen_range(0..sketches.len())];
        let name = format!("t{qi}");
        decls.push(Decl::Sequent(NamedSequent {
            name: name.clone(),
            x: xn.clone(),
            a: an.clone(),
            b: bn.clone(),
            sequent: ExactnessSequent {
                name,
                x: xs.clone(),
                a: as_.clone(),
                b: bs.clone(),
            },
        }));
    }

    for mi in 0..rng.gen_range(0..=2) {
        let (sn, sk) = &sketches[rng.gen_range(0..sketches.len())];
        let (cn, cat) = &categories[rng.gen_range(0..categories.len())];
        let mut vertex_map = BTreeMap::new();
        for v in &sk.graph.vertices {
            if rng.gen_bool(0.7) {
                vertex_map.insert(
                    v.clone(),
                    cat.objects[rng.gen_range(0..cat.objects.len())].clone(),
                );
            }
        }
        let mut edge_map = BTreeMap::new();
        for e in &sk.graph.edges {
            if rng.gen_bool(0.7) {
                edge_map.insert(
                    e.name.clone(),
                    cat.arrows[rng.gen_range(0..cat.arrows.len())].name.clone(),
                );
            }
        }
        decls.push(Decl::Structure(NamedStructure {
            name: format!("m{mi}"),
            structure: Structure {
                sketch: sn.clone(),
                category: cn.clone(),
                vertex_map,
                edge_map,
            },
        }));
    }

    Document { decls }
}

/// Corrupt a serialized document so the parser sees arbitrary junk; the
/// contract is graceful failure, never a panic.
fn corrupt(text: &str, rng: &mut StdRng) -> String {
    let chars: Vec<char> = text.chars().collect();
    if chars.is_empty() {
        return "@".to_string();
    }
    let at = rng.gen_range(0..chars.len());
    match rng.gen_range(0..4) {
        0 => chars[..at].iter().collect(),
        1 => {
            let mut out: String = chars[..at].iter().collect();
            out.push_str("}} @@ ((");
            out.extend(chars[at..].iter());
            out
        }
        2 => {
            let mut out: String = chars.iter().collect();
            out.push_str("\ncategory ");
            out
        }
        _ => {
            let mut out: String = chars[..at].iter().collect();
            out.push_str("limit");
            out.extend(chars[at..].iter().skip(3));
            out
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1024))]

    /// parse ∘ serialize is the identity, and serialization is a fixed
    /// point, on generated well-formed documents.
    #[test]
    fn parse_inverts_serialize(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let doc = random_document(&mut rng);
        let text = serialize_document(&doc);
        let reparsed = parse_document(&text)
            .unwrap_or_else(|e| panic!("generated document fails to parse ({e}):\n{text}"));
        prop_assert_eq!(&reparsed, &doc, "round-trip mismatch for:\n{}", text);
        prop_assert_eq!(serialize_document(&reparsed), text);
    }

    /// Dualizing a document twice restores it exactly.
    #[test]
    fn document_duality_is_involutive(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let doc = random_document(&mut rng);
        prop_assert_eq!(doc.dualized().dualized(), doc);
    }

    /// A sequent is unconditional of finite kind exactly when its dual is.
    #[test]
    fn duality_preserves_unconditionality(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let doc = random_document(&mut rng);
        for d in &doc.decls {
            let Decl::Sequent(s) = d else { continue };
            if !validate_sequent(&s.sequent).is_valid() {
                continue;
            }
            let direct = is_unconditional_finite_kind(&s.sequent);
            let dual = is_unconditional_finite_kind(&dualize_sequent(&s.sequent));
            prop_assert_eq!(direct, dual);
        }
    }

    /// Corrupted input parses to an error that carries a position — and
    /// never panics.
    #[test]
    fn parse_errors_carry_positions(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let doc = random_document(&mut rng);
        let garbled = corrupt(&serialize_document(&doc), &mut rng);
        match parse_document(&garbled) {
            Ok(_) => {}
            Err(ParseError::Syntax { position, .. }) => {
                prop_assert!(position.line >= 1 && position.column >= 1);
            }
            Err(ParseError::Resolution { errors }) => {
                prop_assert!(!errors.is_empty());
                for e in errors {
                    prop_assert!(e.position.line >= 1 && e.position.column >= 1);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Enumeration agrees with the raw-search oracle on generated
    /// sketches small enough to search exhaustively. Fewer cases than the
    /// parser properties: each case is a full exhaustive search.
    #[test]
    fn enumeration_matches_raw_search(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let doc = random_document(&mut rng);
        let sketches: Vec<&Sketch> = doc.decls.iter().filter_map(|d| match d {
            Decl::Sketch(s) => Some(&s.sketch),
            _ => None,
        }).collect();
        let categories: Vec<&FiniteCategory> = doc.decls.iter().filter_map(|d| match d {
            Decl::Category(c) => Some(&c.category),
            _ => None,
        }).collect();
        for s in sketches {
            for c in &categories {
                if raw_size(s, c).is_some_and(|n| n <= 2_000) {
                    check_enumeration_against_raw(s, c);
                }
            }
        }
    }
}
