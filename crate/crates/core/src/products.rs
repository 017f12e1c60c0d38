//! Strong and directed graph products, embeddings into them, and the
//! clique diagnostics (strips, redundant / attractive / magnetic vertices).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::decomposition::{verify_decomposition, TreeDecomposition};
use crate::graph::{Digraph, Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProductError {
    #[error("vertex {0} has no image in the embedding")]
    Unmapped(Vertex),
    #[error("vertices {0} and {1} share an image")]
    DegenerateEdge(Vertex, Vertex),
    #[error("vertex set is not a clique of the guest")]
    NotAClique,
    #[error("clique is not diagonal")]
    NotDiagonal,
    #[error("a projection does not induce a transitive tournament")]
    ProjectionsNotTransitive,
    #[error("clique must have at least {0} vertices")]
    CliqueTooSmall(usize),
}

/// Row-major id of the product vertex (a, b) when the second factor has
/// `n2` vertices.
pub fn pair_to_index(a: Vertex, b: Vertex, n2: usize) -> Vertex {
    a * n2 + b
}

pub fn index_to_pair(i: Vertex, n2: usize) -> (Vertex, Vertex) {
    (i / n2, i % n2)
}

/// Strong product: (a,b) ~ (a',b') when one coordinate is equal and the
/// other adjacent, or both are adjacent.
pub fn strong_product(g1: &Graph, g2: &Graph) -> Graph {
    let n1 = g1.vertex_count();
    let n2 = g2.vertex_count();
    let mut edges = BTreeSet::new();
    for a in 0..n1 {
        for (b, b2) in g2.edges() {
            edges.insert((pair_to_index(a, b, n2), pair_to_index(a, b2, n2)));
        }
    }
    for (a, a2) in g1.edges() {
        for b in 0..n2 {
            edges.insert((pair_to_index(a, b, n2), pair_to_index(a2, b, n2)));
        }
        for (b, b2) in g2.edges() {
            let e1 = (pair_to_index(a, b, n2), pair_to_index(a2, b2, n2));
            let e2 = (pair_to_index(a, b2, n2), pair_to_index(a2, b, n2));
            edges.insert((e1.0.min(e1.1), e1.0.max(e1.1)));
            edges.insert((e2.0.min(e2.1), e2.0.max(e2.1)));
        }
    }
    Graph::new(n1 * n2, edges).expect("product edges are well formed")
}

/// Directed product: arcs copy one factor arc while the other coordinate
/// stays fixed, plus diagonal arcs where both factor arcs are co-directed.
pub fn directed_product(d1: &Digraph, d2: &Digraph) -> Digraph {
    let n1 = d1.vertex_count();
    let n2 = d2.vertex_count();
    let mut arcs = BTreeSet::new();
    for x in 0..n1 {
        for (y, y2) in d2.arcs() {
            arcs.insert((pair_to_index(x, y, n2), pair_to_index(x, y2, n2)));
        }
    }
    for (x, x2) in d1.arcs() {
        for y in 0..n2 {
            arcs.insert((pair_to_index(x, y, n2), pair_to_index(x2, y, n2)));
        }
        for (y, y2) in d2.arcs() {
            arcs.insert((pair_to_index(x, y, n2), pair_to_index(x2, y2, n2)));
        }
    }
    let oriented = !arcs.iter().any(|&(u, v)| arcs.contains(&(v, u)));
    Digraph::new(n1 * n2, arcs, oriented).expect("product arcs are well formed")
}

/// An injective placement of guest vertices at coordinate pairs of a
/// directed product, with optional width witnesses for the two hosts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddingWire", into = "EmbeddingWire")]
pub struct Embedding {
    pub host1: Digraph,
    pub host2: Digraph,
    pub map: BTreeMap<Vertex, (Vertex, Vertex)>,
    pub witness1: Option<TreeDecomposition>,
    pub witness2: Option<TreeDecomposition>,
}

#[derive(Serialize, Deserialize)]
struct EmbeddingWire {
    host1: Digraph,
    host2: Digraph,
    map: Vec<(Vertex, (Vertex, Vertex))>,
    witness1: Option<TreeDecomposition>,
    witness2: Option<TreeDecomposition>,
}

impl From<Embedding> for EmbeddingWire {
    fn from(e: Embedding) -> Self {
        EmbeddingWire {
            host1: e.host1,
            host2: e.host2,
            map: e.map.into_iter().collect(),
            witness1: e.witness1,
            witness2: e.witness2,
        }
    }
}

impl TryFrom<EmbeddingWire> for Embedding {
    type Error = String;
    fn try_from(w: EmbeddingWire) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (g, (a, b)) in w.map {
            if a >= w.host1.vertex_count() || b >= w.host2.vertex_count() {
                return Err(format!(
                    "image ({}, {}) of vertex {} outside host bounds",
                    a, b, g
                ));
            }
            if map.insert(g, (a, b)).is_some() {
                return Err(format!("vertex {} mapped twice", g));
            }
        }
        Ok(Embedding {
            host1: w.host1,
            host2: w.host2,
            map,
            witness1: w.witness1,
            witness2: w.witness2,
        })
    }
}

impl Embedding {
    pub fn image(&self, v: Vertex) -> Result<(Vertex, Vertex), ProductError> {
        self.map.get(&v).copied().ok_or(ProductError::Unmapped(v))
    }

    /// Distinct host1 coordinates of the set, ascending.
    pub fn projection1(&self, c: &VertexSet) -> Result<VertexSet, ProductError> {
        c.iter().map(|&v| self.image(v).map(|(a, _)| a)).collect()
    }

    /// Distinct host2 coordinates of the set, ascending.
    pub fn projection2(&self, c: &VertexSet) -> Result<VertexSet, ProductError> {
        c.iter().map(|&v| self.image(v).map(|(_, b)| b)).collect()
    }

    pub fn used_coordinates(&self) -> BTreeSet<(Vertex, Vertex)> {
        self.map.values().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    Horizontal,
    Vertical,
    Diagonal,
}

/// Coordinate-level class of a guest edge: horizontal edges share the host1
/// coordinate, vertical edges share the host2 coordinate, diagonal edges
/// differ in both.
pub fn classify_edge(e: &Embedding, u: Vertex, v: Vertex) -> Result<EdgeClass, ProductError> {
    let (a1, b1) = e.image(u)?;
    let (a2, b2) = e.image(v)?;
    match (a1 == a2, b1 == b2) {
        (true, true) => Err(ProductError::DegenerateEdge(u, v)),
        (true, false) => Ok(EdgeClass::Horizontal),
        (false, true) => Ok(EdgeClass::Vertical),
        (false, false) => Ok(EdgeClass::Diagonal),
    }
}

fn edge_realized(e: &Embedding, u: Vertex, v: Vertex) -> Result<bool, ProductError> {
    let (a1, b1) = e.image(u)?;
    let (a2, b2) = e.image(v)?;
    Ok(match classify_edge(e, u, v)? {
        EdgeClass::Horizontal => e.host2.has_arc(b1, b2) || e.host2.has_arc(b2, b1),
        EdgeClass::Vertical => e.host1.has_arc(a1, a2) || e.host1.has_arc(a2, a1),
        EdgeClass::Diagonal => {
            (e.host1.has_arc(a1, a2) && e.host2.has_arc(b1, b2))
                || (e.host1.has_arc(a2, a1) && e.host2.has_arc(b2, b1))
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub is_valid: bool,
    pub width: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub is_valid: bool,
    pub injective: bool,
    pub covers_all_vertices: bool,
    pub edge_classes: Vec<(Vertex, Vertex, EdgeClass)>,
    pub horizontal_edges: usize,
    pub vertical_edges: usize,
    pub diagonal_edges: usize,
    pub host1_max_indegree: usize,
    pub host2_max_indegree: usize,
    pub witness1: Option<WitnessReport>,
    pub witness2: Option<WitnessReport>,
    pub violations: Vec<String>,
}

/// Checks injectivity, coordinate bounds, coverage of the guest vertex set,
/// realizability of every guest edge in the directed product, and any
/// attached host witnesses.
pub fn verify_embedding(g: &Graph, e: &Embedding) -> EmbeddingReport {
    let mut violations = Vec::new();
    let n = g.vertex_count();

    let mut covers_all_vertices = true;
    for v in 0..n {
        if !e.map.contains_key(&v) {
            covers_all_vertices = false;
            violations.push(format!("vertex {} has no image", v));
        }
    }
    for (&v, &(a, b)) in &e.map {
        if v >= n {
            covers_all_vertices = false;
            violations.push(format!("mapped vertex {} is not a guest vertex", v));
        }
        if a >= e.host1.vertex_count() || b >= e.host2.vertex_count() {
            covers_all_vertices = false;
            violations.push(format!(
                "image ({}, {}) of vertex {} out of bounds",
                a, b, v
            ));
        }
    }

    let mut injective = true;
    let mut seen: BTreeMap<(Vertex, Vertex), Vertex> = BTreeMap::new();
    for (&v, &coord) in &e.map {
        if let Some(&w) = seen.get(&coord) {
            injective = false;
            violations.push(format!(
                "vertices {} and {} share the image ({}, {})",
                w, v, coord.0, coord.1
            ));
        } else {
            seen.insert(coord, v);
        }
    }

    let mut edge_classes = Vec::new();
    let mut horizontal_edges = 0;
    let mut vertical_edges = 0;
    let mut diagonal_edges = 0;
    let mut edges_ok = true;
    for (u, v) in g.edges() {
        match classify_edge(e, u, v) {
            Ok(class) => {
                match class {
                    EdgeClass::Horizontal => horizontal_edges += 1,
                    EdgeClass::Vertical => vertical_edges += 1,
                    EdgeClass::Diagonal => diagonal_edges += 1,
                }
                edge_classes.push((u, v, class));
                if !edge_realized(e, u, v).unwrap_or(false) {
                    edges_ok = false;
                    violations.push(format!(
                        "edge [{}, {}] is {:?} but the product lacks it",
                        u, v, class
                    ));
                }
            }
            Err(err) => {
                edges_ok = false;
                violations.push(format!("edge [{}, {}]: {}", u, v, err));
            }
        }
    }

    let witness_report = |host: &Digraph,
                          wit: &Option<TreeDecomposition>,
                          violations: &mut Vec<String>,
                          which: usize| {
        wit.as_ref().map(|td| {
            let width = td.width();
            let k = width.max(0) as usize;
            let rep = verify_decomposition(&host.underlying(), td, k);
            if !rep.is_valid {
                violations.push(format!("witness{} is not a valid decomposition", which));
            }
            WitnessReport {
                is_valid: rep.is_valid,
                width,
            }
        })
    };
    let witness1 = witness_report(&e.host1, &e.witness1, &mut violations, 1);
    let witness2 = witness_report(&e.host2, &e.witness2, &mut violations, 2);

    let witnesses_ok = witness1.as_ref().map_or(true, |w| w.is_valid)
        && witness2.as_ref().map_or(true, |w| w.is_valid);

    EmbeddingReport {
        is_valid: injective && covers_all_vertices && edges_ok && witnesses_ok,
        injective,
        covers_all_vertices,
        edge_classes,
        horizontal_edges,
        vertical_edges,
        diagonal_edges,
        host1_max_indegree: e.host1.max_indegree(),
        host2_max_indegree: e.host2.max_indegree(),
        witness1,
        witness2,
        violations,
    }
}

/// Projection sizes (|P1(c)|, |P2(c)|) of a vertex set.
pub fn projection_profile(e: &Embedding, c: &VertexSet) -> Result<(usize, usize), ProductError> {
    Ok((e.projection1(c)?.len(), e.projection2(c)?.len()))
}

/// Whether the two coordinate projections of `c` induce cliques in the
/// underlying host graphs.
pub fn projections_induce_cliques(
    e: &Embedding,
    c: &VertexSet,
) -> Result<(bool, bool), ProductError> {
    let p1 = e.projection1(c)?;
    let p2 = e.projection2(c)?;
    let c1 = e.host1.underlying().is_clique(&p1).unwrap_or(false);
    let c2 = e.host2.underlying().is_clique(&p2).unwrap_or(false);
    Ok((c1, c2))
}

/// Flags for a clique member: does another member share its projection, and
/// are all host arcs from the rest of the projection directed towards it.
#[derive(Debug, Clone, Serialize)]
pub struct MemberFlags {
    pub v: Vertex,
    pub redundant1: bool,
    pub redundant2: bool,
    pub attractive1: bool,
    pub attractive2: bool,
}

/// Flags for a vertex attached to the clique: outside both strips
/// (diagonal), or inside one strip with all arcs pulling towards it
/// (magnetic).
#[derive(Debug, Clone, Serialize)]
pub struct AttachedFlags {
    pub v: Vertex,
    pub diagonal: bool,
    pub magnetic1: bool,
    pub magnetic2: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CliqueDiagnostics {
    pub attachment_count: usize,
    pub members: Vec<MemberFlags>,
    pub attached: Vec<AttachedFlags>,
}

/// No arc leaves `from` towards any vertex of `targets` in `host`.
fn no_arc_from(host: &Digraph, from: Vertex, targets: &VertexSet) -> bool {
    targets.iter().all(|&t| t == from || !host.has_arc(from, t))
}

/// Attachment count above which a k-clique in a product with indegree
/// bounds (s, t) must see a diagonal or magnetic attached vertex:
/// 2k^2 max(s,t) + k^2 + 1.
pub fn attachment_threshold(s: usize, t: usize, k: usize) -> usize {
    2 * k * k * s.max(t) + k * k + 1
}

/// Per-vertex strip/redundancy/attraction/magnetism flags for a clique and
/// its attached vertices.
pub fn clique_diagnostics(
    g: &Graph,
    e: &Embedding,
    c: &VertexSet,
) -> Result<CliqueDiagnostics, ProductError> {
    if c.is_empty() {
        return Err(ProductError::CliqueTooSmall(1));
    }
    if !g.is_clique(c).map_err(|_| ProductError::NotAClique)? {
        return Err(ProductError::NotAClique);
    }
    let p1 = e.projection1(c)?;
    let p2 = e.projection2(c)?;

    let mut members = Vec::new();
    for &v in c {
        let (a, b) = e.image(v)?;
        let redundant1 = c
            .iter()
            .any(|&w| w != v && e.image(w).map(|(x, _)| x) == Ok(a));
        let redundant2 = c
            .iter()
            .any(|&w| w != v && e.image(w).map(|(_, y)| y) == Ok(b));
        // Attractive: every arc between the rest of the projection and this
        // coordinate points here, so no arc leaves it towards the rest.
        let attractive1 = no_arc_from(&e.host1, a, &p1);
        let attractive2 = no_arc_from(&e.host2, b, &p2);
        members.push(MemberFlags {
            v,
            redundant1,
            redundant2,
            attractive1,
            attractive2,
        });
    }

    let mut attached = Vec::new();
    for v in 0..g.vertex_count() {
        if c.contains(&v) || !c.iter().all(|&w| g.has_edge(v, w)) {
            continue;
        }
        let (a, b) = e.image(v)?;
        let in_strip1 = p1.contains(&a);
        let in_strip2 = p2.contains(&b);
        let diagonal = !in_strip1 && !in_strip2;
        let magnetic1 = !in_strip1 && in_strip2 && no_arc_from(&e.host1, a, &p1);
        let magnetic2 = in_strip1 && !in_strip2 && no_arc_from(&e.host2, b, &p2);
        attached.push(AttachedFlags {
            v,
            diagonal,
            magnetic1,
            magnetic2,
        });
    }

    Ok(CliqueDiagnostics {
        attachment_count: attached.len(),
        members,
        attached,
    })
}

/// Orders the vertices of a transitive tournament projection from source to
/// sink by descending out-degree within the set.
fn tournament_positions(host: &Digraph, s: &VertexSet) -> Option<Vec<Vertex>> {
    if !host.is_transitive_tournament(s).unwrap_or(false) {
        return None;
    }
    let mut order: Vec<Vertex> = s.iter().copied().collect();
    order.sort_by_key(|&v| s.iter().filter(|&&w| host.has_arc(v, w)).count());
    order.reverse();
    Some(order)
}

/// The clique edge realized by the big arcs of both projections, plus its
/// two swapped-coordinate siblings, source sibling first.
pub fn big_diagonal_edge(
    g: &Graph,
    e: &Embedding,
    d: &VertexSet,
) -> Result<((Vertex, Vertex), ((Vertex, Vertex), (Vertex, Vertex))), ProductError> {
    if d.len() < 2 {
        return Err(ProductError::CliqueTooSmall(2));
    }
    if !g.is_clique(d).map_err(|_| ProductError::NotAClique)? {
        return Err(ProductError::NotAClique);
    }
    for &u in d {
        for &v in d {
            if u < v && classify_edge(e, u, v)? != EdgeClass::Diagonal {
                return Err(ProductError::NotDiagonal);
            }
        }
    }
    let p1 = e.projection1(d)?;
    let p2 = e.projection2(d)?;
    let order1 =
        tournament_positions(&e.host1, &p1).ok_or(ProductError::ProjectionsNotTransitive)?;
    let order2 =
        tournament_positions(&e.host2, &p2).ok_or(ProductError::ProjectionsNotTransitive)?;

    // Since all clique arcs are co-directed, both tournament orders list the
    // clique in the same vertex order.
    let mut by_pos1: Vec<Vertex> = d.iter().copied().collect();
    by_pos1.sort_by_key(|&v| {
        let (a, _) = e.image(v).expect("checked above");
        order1
            .iter()
            .position(|&x| x == a)
            .expect("projection member")
    });
    let by_pos2_ok = by_pos1.iter().enumerate().all(|(i, &v)| {
        let (_, b) = e.image(v).expect("checked above");
        order2[i] == b
    });
    if !by_pos2_ok {
        return Err(ProductError::ProjectionsNotTransitive);
    }

    let src = by_pos1[by_pos1.len() - 2];
    let snk = by_pos1[by_pos1.len() - 1];
    let (a_src, b_src) = e.image(src)?;
    let (a_snk, b_snk) = e.image(snk)?;
    Ok(((src, snk), ((a_src, b_snk), (a_snk, b_src))))
}
