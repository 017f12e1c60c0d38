//! Undirected graphs and digraphs on dense vertex ids `0..n`.
//!
//! Edges are stored normalized (`u < v`), arcs as ordered pairs. Both types
//! are immutable after construction and serialize to a stable JSON form with
//! sorted edge lists.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub type Vertex = usize;
pub type VertexSet = BTreeSet<Vertex>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {0} out of range for {1} vertices")]
    VertexOutOfRange(Vertex, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge [{0}, {1}]")]
    DuplicateEdge(Vertex, Vertex),
    #[error("duplicate arc [{0}, {1}]")]
    DuplicateArc(Vertex, Vertex),
    #[error("digraph is flagged oriented but contains anti-parallel arcs {0} <-> {1}")]
    NotOriented(Vertex, Vertex),
    #[error("vertex set does not induce a transitive tournament")]
    NotTransitiveTournament,
    #[error("vertex set needs at least {0} vertices")]
    SetTooSmall(usize),
}

fn check_vertex(v: Vertex, n: usize) -> Result<(), GraphError> {
    if v >= n {
        Err(GraphError::VertexOutOfRange(v, n))
    } else {
        Ok(())
    }
}

/// Simple undirected graph. Vertices are `0..n`; `edges` holds pairs with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphWire", into = "GraphWire")]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(Vertex, Vertex)>,
    adj: Vec<VertexSet>,
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
}

impl From<Graph> for GraphWire {
    fn from(g: Graph) -> Self {
        GraphWire {
            n: g.n,
            edges: g.edges.iter().copied().collect(),
        }
    }
}

impl TryFrom<GraphWire> for Graph {
    type Error = GraphError;
    fn try_from(w: GraphWire) -> Result<Self, GraphError> {
        Graph::new(w.n, w.edges)
    }
}

impl Graph {
    /// Builds a graph, normalizing edge orientation and rejecting self-loops,
    /// out-of-range endpoints and duplicates.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        let mut adj = vec![VertexSet::new(); n];
        for (a, b) in edges {
            check_vertex(a, n)?;
            check_vertex(b, n)?;
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        Ok(Graph { n, edges: set, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph::new(n, []).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, edges).unwrap()
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        Graph::new(n, edges).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn neighbors(&self, v: Vertex) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    /// The same graph plus one edge. Errors on invalid or duplicate edges.
    pub fn with_edge(&self, u: Vertex, v: Vertex) -> Result<Self, GraphError> {
        let mut edges: Vec<_> = self.edges.iter().copied().collect();
        edges.push((u, v));
        Graph::new(self.n, edges)
    }

    /// Induced subgraph on `keep`, relabelled to `0..keep.len()` in sorted order.
    pub fn induced(&self, keep: &VertexSet) -> Graph {
        let order: Vec<Vertex> = keep.iter().copied().collect();
        let index: std::collections::BTreeMap<Vertex, usize> =
            order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .map(|(a, b)| (index[a], index[b]));
        Graph::new(order.len(), edges).unwrap()
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.n
    }

    /// Checks that every two distinct vertices of `s` are adjacent.
    pub fn is_clique(&self, s: &VertexSet) -> Result<bool, GraphError> {
        for &v in s {
            check_vertex(v, self.n)?;
        }
        let vs: Vec<Vertex> = s.iter().copied().collect();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if !self.has_edge(vs[i], vs[j]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// All cliques of exactly `k` vertices, each sorted ascending, the list
    /// sorted lexicographically. Enumerates maximal cliques (Bron-Kerbosch
    /// with pivoting) and expands their k-subsets.
    pub fn cliques_of_size(&self, k: usize) -> Vec<Vec<Vertex>> {
        if k == 0 || k > self.n {
            return Vec::new();
        }
        if k == 1 {
            return (0..self.n).map(|v| vec![v]).collect();
        }
        let mut found: BTreeSet<Vec<Vertex>> = BTreeSet::new();
        let mut maximal = Vec::new();
        self.bron_kerbosch(
            &mut VertexSet::new(),
            &mut (0..self.n).collect(),
            &mut VertexSet::new(),
            &mut maximal,
        );
        let mut scratch = Vec::new();
        for m in &maximal {
            if m.len() >= k {
                let verts: Vec<Vertex> = m.iter().copied().collect();
                subsets_of_size(&verts, k, &mut scratch, 0, &mut found);
            }
        }
        found.into_iter().collect()
    }

    fn bron_kerbosch(
        &self,
        r: &mut VertexSet,
        p: &mut VertexSet,
        x: &mut VertexSet,
        out: &mut Vec<VertexSet>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        let pivot = p
            .union(x)
            .copied()
            .max_by_key(|&u| self.adj[u].intersection(p).count())
            .unwrap();
        let candidates: Vec<Vertex> = p.difference(&self.adj[pivot]).copied().collect();
        for v in candidates {
            r.insert(v);
            let mut p2: VertexSet = p.intersection(&self.adj[v]).copied().collect();
            let mut x2: VertexSet = x.intersection(&self.adj[v]).copied().collect();
            self.bron_kerbosch(r, &mut p2, &mut x2, out);
            r.remove(&v);
            p.remove(&v);
            x.insert(v);
        }
    }
}

fn subsets_of_size(
    verts: &[Vertex],
    k: usize,
    scratch: &mut Vec<Vertex>,
    from: usize,
    out: &mut BTreeSet<Vec<Vertex>>,
) {
    if scratch.len() == k {
        out.insert(scratch.clone());
        return;
    }
    let need = k - scratch.len();
    for i in from..verts.len() {
        if verts.len() - i < need {
            break;
        }
        scratch.push(verts[i]);
        subsets_of_size(verts, k, scratch, i + 1, out);
        scratch.pop();
    }
}

/// Digraph on dense vertex ids. `oriented` is a validated claim: when set,
/// construction rejects anti-parallel arc pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DigraphWire", into = "DigraphWire")]
pub struct Digraph {
    n: usize,
    arcs: BTreeSet<(Vertex, Vertex)>,
    oriented: bool,
    out_adj: Vec<VertexSet>,
    in_adj: Vec<VertexSet>,
}

#[derive(Serialize, Deserialize)]
struct DigraphWire {
    n: usize,
    arcs: Vec<(Vertex, Vertex)>,
    oriented: bool,
}

impl From<Digraph> for DigraphWire {
    fn from(d: Digraph) -> Self {
        DigraphWire {
            n: d.n,
            arcs: d.arcs.iter().copied().collect(),
            oriented: d.oriented,
        }
    }
}

impl TryFrom<DigraphWire> for Digraph {
    type Error = GraphError;
    fn try_from(w: DigraphWire) -> Result<Self, GraphError> {
        Digraph::new(w.n, w.arcs, w.oriented)
    }
}

impl Digraph {
    pub fn new(
        n: usize,
        arcs: impl IntoIterator<Item = (Vertex, Vertex)>,
        oriented: bool,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        let mut out_adj = vec![VertexSet::new(); n];
        let mut in_adj = vec![VertexSet::new(); n];
        for (a, b) in arcs {
            check_vertex(a, n)?;
            check_vertex(b, n)?;
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if !set.insert((a, b)) {
                return Err(GraphError::DuplicateArc(a, b));
            }
            out_adj[a].insert(b);
            in_adj[b].insert(a);
        }
        if oriented {
            for &(a, b) in &set {
                if a < b && set.contains(&(b, a)) {
                    return Err(GraphError::NotOriented(a, b));
                }
            }
        }
        Ok(Digraph {
            n,
            arcs: set,
            oriented,
            out_adj,
            in_adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn is_oriented(&self) -> bool {
        self.oriented
    }

    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        self.arcs.contains(&(u, v))
    }

    pub fn out_neighbors(&self, v: Vertex) -> &VertexSet {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: Vertex) -> &VertexSet {
        &self.in_adj[v]
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.in_adj[v].len()
    }

    /// Transitive tournament on `0..n`: all arcs `i -> j` for `i < j`.
    pub fn transitive_tournament(n: usize) -> Self {
        let mut arcs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                arcs.push((i, j));
            }
        }
        Digraph::new(n, arcs, true).unwrap()
    }

    /// Forgets arc directions; anti-parallel pairs collapse to a single edge.
    pub fn underlying(&self) -> Graph {
        let edges: BTreeSet<(Vertex, Vertex)> = self
            .arcs
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        Graph::new(self.n, edges).unwrap()
    }

    /// Maximum in-degree over all vertices; 0 for an arcless digraph.
    pub fn max_indegree(&self) -> usize {
        (0..self.n).map(|v| self.in_adj[v].len()).max().unwrap_or(0)
    }

    /// Whether `s` induces a transitive tournament: exactly one arc per pair
    /// and the orientation is a total order.
    pub fn is_transitive_tournament(&self, s: &VertexSet) -> Result<bool, GraphError> {
        for &v in s {
            check_vertex(v, self.n)?;
        }
        self.tournament_order(s).map(|o| o.is_some())
    }

    /// Topological order of an induced transitive tournament (sources first),
    /// or None when `s` does not induce one.
    fn tournament_order(&self, s: &VertexSet) -> Result<Option<Vec<Vertex>>, GraphError> {
        let vs: Vec<Vertex> = s.iter().copied().collect();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let fwd = self.has_arc(vs[i], vs[j]);
                let bwd = self.has_arc(vs[j], vs[i]);
                if fwd == bwd {
                    return Ok(None);
                }
            }
        }
        let mut order = vs.clone();
        // In a transitive tournament out-degrees within the set are all distinct.
        order.sort_by_key(|&v| s.len() - self.out_adj[v].intersection(s).count());
        for w in order.windows(2) {
            if !self.has_arc(w[0], w[1]) {
                return Ok(None);
            }
        }
        // Transitivity: every earlier vertex must beat every later one.
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                if !self.has_arc(order[i], order[j]) {
                    return Ok(None);
                }
            }
        }
        Ok(Some(order))
    }

    /// The unique vertex of an induced transitive tournament with no outgoing
    /// arcs inside `s`.
    pub fn sink_of(&self, s: &VertexSet) -> Result<Vertex, GraphError> {
        if s.is_empty() {
            return Err(GraphError::SetTooSmall(1));
        }
        match self.tournament_order(s)? {
            Some(order) => Ok(*order.last().unwrap()),
            None => Err(GraphError::NotTransitiveTournament),
        }
    }

    /// The big arc of an induced transitive tournament: the arc `(u, v)` where
    /// `v` is the sink and `u` is the unique vertex of out-degree 1 within `s`.
    pub fn big_arc(&self, s: &VertexSet) -> Result<(Vertex, Vertex), GraphError> {
        if s.len() < 2 {
            return Err(GraphError::SetTooSmall(2));
        }
        match self.tournament_order(s)? {
            Some(order) => Ok((order[order.len() - 2], order[order.len() - 1])),
            None => Err(GraphError::NotTransitiveTournament),
        }
    }
}
