//! Constructive embedders into directed products.
//!
//! Each routine consumes a construction recipe (a trace or a graph) and
//! emits an embedding certificate with oriented hosts. The trace embedder
//! keeps a ledger of diagonal cliques so that reflected coordinates are
//! never handed out twice.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::decomposition::{
    rainbow_color_ktree, recognize_simple_ktree, ConstructionTrace, TreeDecomposition,
};
use crate::graph::{Digraph, Graph, Vertex, VertexSet};
use crate::products::Embedding;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbedderError {
    #[error("not outerplanar: {0}")]
    NotOuterplanar(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("not a partition: {0}")]
    NotAPartition(String),
    #[error("construction invariant broken: {0}")]
    InvariantBroken(String),
}

/// Bookkeeping carried through a trace embedding: every diagonal k-clique
/// placed so far, keyed by its sorted guest vertices, with the two swapped
/// coordinates of its big diagonal edge, plus the set of all occupied
/// coordinates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SiblingLedger {
    pub diagonal_record: BTreeMap<Vec<Vertex>, ((Vertex, Vertex), (Vertex, Vertex))>,
    pub used: BTreeSet<(Vertex, Vertex)>,
}

impl SiblingLedger {
    /// Consistency of the ledger against the current placement: occupied
    /// big siblings must hold a common neighbour of their clique, and no
    /// coordinate may be the unoccupied big sibling of two cliques.
    pub fn check(&self, g: &Graph, map: &BTreeMap<Vertex, (Vertex, Vertex)>) -> Result<(), String> {
        let occupant: BTreeMap<(Vertex, Vertex), Vertex> =
            map.iter().map(|(&v, &c)| (c, v)).collect();
        if self.used != occupant.keys().copied().collect() {
            return Err("used set disagrees with the placement".into());
        }
        let mut unused_owner: BTreeMap<(Vertex, Vertex), &[Vertex]> = BTreeMap::new();
        for (clique, &(s1, s2)) in &self.diagonal_record {
            for s in [s1, s2] {
                match occupant.get(&s) {
                    Some(&w) => {
                        for &c in clique {
                            if !g.has_edge(w, c) {
                                return Err(format!(
                                    "coordinate {:?} holds {} which is not adjacent to all of {:?}",
                                    s, w, clique
                                ));
                            }
                        }
                    }
                    None => {
                        if unused_owner.insert(s, clique).is_some() {
                            return Err(format!(
                                "coordinate {:?} is the unused big sibling of two cliques",
                                s
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Members of `s` sorted by descending out-degree within `s`, or None if
/// the induced digraph is not a transitive tournament.
fn tournament_order(arcs: &BTreeSet<(Vertex, Vertex)>, s: &VertexSet) -> Option<Vec<Vertex>> {
    let mut order: Vec<Vertex> = s.iter().copied().collect();
    order.sort_by_key(|&v| {
        std::cmp::Reverse(
            s.iter()
                .filter(|&&w| w != v && arcs.contains(&(v, w)))
                .count(),
        )
    });
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if !arcs.contains(&(order[i], order[j])) {
                return None;
            }
        }
    }
    Some(order)
}

/// One growing host digraph together with its incrementally built width
/// witness.
struct HostBuilder {
    n: usize,
    arcs: BTreeSet<(Vertex, Vertex)>,
    bags: Vec<VertexSet>,
    tree_edges: BTreeSet<(usize, usize)>,
}

impl HostBuilder {
    fn transitive_tournament(k: usize) -> HostBuilder {
        let mut arcs = BTreeSet::new();
        for i in 0..k {
            for j in i + 1..k {
                arcs.insert((i, j));
            }
        }
        HostBuilder {
            n: k,
            arcs,
            bags: vec![(0..k).collect()],
            tree_edges: BTreeSet::new(),
        }
    }

    fn single_arc() -> HostBuilder {
        HostBuilder {
            n: 2,
            arcs: [(0, 1)].into_iter().collect(),
            bags: vec![[0, 1].into_iter().collect()],
            tree_edges: BTreeSet::new(),
        }
    }

    /// New vertex receiving one arc from every member of `clique`, which
    /// must already sit inside some witness bag.
    fn attach_vertex(&mut self, clique: &VertexSet) -> Result<Vertex, EmbedderError> {
        let home = self
            .bags
            .iter()
            .position(|b| clique.is_subset(b))
            .ok_or_else(|| {
                EmbedderError::InvariantBroken("witness decomposition lost a host clique".into())
            })?;
        let x = self.n;
        self.n += 1;
        for &u in clique {
            self.arcs.insert((u, x));
        }
        let mut bag = clique.clone();
        bag.insert(x);
        let id = self.bags.len();
        self.bags.push(bag);
        self.tree_edges.insert((home, id));
        Ok(x)
    }

    fn sink(&self, s: &VertexSet) -> Result<Vertex, EmbedderError> {
        tournament_order(&self.arcs, s)
            .map(|o| *o.last().expect("projection sets are nonempty"))
            .ok_or_else(|| {
                EmbedderError::InvariantBroken(
                    "clique projection is not a transitive tournament".into(),
                )
            })
    }

    fn big_arc(&self, s: &VertexSet) -> Result<(Vertex, Vertex), EmbedderError> {
        tournament_order(&self.arcs, s)
            .map(|o| (o[o.len() - 2], o[o.len() - 1]))
            .ok_or_else(|| {
                EmbedderError::InvariantBroken(
                    "clique projection is not a transitive tournament".into(),
                )
            })
    }

    fn digraph(&self) -> Digraph {
        Digraph::new(self.n, self.arcs.iter().copied(), true)
            .expect("hosts only ever gain arcs into fresh vertices")
    }

    fn witness(&self) -> TreeDecomposition {
        TreeDecomposition {
            bags: self.bags.clone(),
            tree_edges: self.tree_edges.clone(),
            root: Some(0),
        }
    }
}

struct TraceRun {
    k: usize,
    g: Graph,
    h1: HostBuilder,
    h2: HostBuilder,
    map: BTreeMap<Vertex, (Vertex, Vertex)>,
    ledger: SiblingLedger,
}

impl TraceRun {
    fn place(&mut self, v: Vertex, coord: (Vertex, Vertex)) -> Result<(), EmbedderError> {
        if !self.ledger.used.insert(coord) {
            return Err(EmbedderError::InvariantBroken(format!(
                "coordinate {:?} handed out twice",
                coord
            )));
        }
        self.map.insert(v, coord);
        Ok(())
    }

    /// Records `d` with its big sibling pair if it is a diagonal k-clique.
    fn record_if_diagonal(&mut self, mut d: Vec<Vertex>) -> Result<bool, EmbedderError> {
        d.sort_unstable();
        let imgs: Vec<(Vertex, Vertex)> = d.iter().map(|u| self.map[u]).collect();
        let p1: VertexSet = imgs.iter().map(|c| c.0).collect();
        let p2: VertexSet = imgs.iter().map(|c| c.1).collect();
        if p1.len() < self.k || p2.len() < self.k {
            return Ok(false);
        }
        let (a1, b1) = self.h1.big_arc(&p1)?;
        let (a2, b2) = self.h2.big_arc(&p2)?;
        let src = d[imgs
            .iter()
            .position(|c| c.0 == a1)
            .expect("big arc tail projects from the clique")];
        let snk = d[imgs
            .iter()
            .position(|c| c.0 == b1)
            .expect("big arc head projects from the clique")];
        if self.map[&src].1 != a2 || self.map[&snk].1 != b2 {
            return Err(EmbedderError::InvariantBroken(
                "projection tournaments order a diagonal clique inconsistently".into(),
            ));
        }
        self.ledger.diagonal_record.insert(d, ((a1, b2), (b1, a2)));
        Ok(true)
    }

    /// Scan the k cliques formed by swapping one attachment member for the
    /// new vertex and record any that are diagonal. Returns how many were.
    fn record_new_diagonals(&mut self, v: Vertex, cs: &[Vertex]) -> Result<usize, EmbedderError> {
        if self.k < 2 {
            return Ok(0);
        }
        let mut created = 0;
        for drop in 0..cs.len() {
            let mut d: Vec<Vertex> = cs.to_vec();
            d[drop] = v;
            if self.record_if_diagonal(d)? {
                created += 1;
            }
        }
        Ok(created)
    }

    fn step(&mut self, v: Vertex, clique: &[Vertex]) -> Result<(), EmbedderError> {
        let mut cs: Vec<Vertex> = clique.to_vec();
        cs.sort_unstable();
        let imgs: Vec<(Vertex, Vertex)> = cs.iter().map(|u| self.map[u]).collect();
        let p1: VertexSet = imgs.iter().map(|c| c.0).collect();
        let p2: VertexSet = imgs.iter().map(|c| c.1).collect();

        let mut shared = None;
        'scan: for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                if imgs[i].0 == imgs[j].0 {
                    shared = Some(true);
                    break 'scan;
                }
                if imgs[i].1 == imgs[j].1 {
                    shared = Some(false);
                    break 'scan;
                }
            }
        }

        let diagonal = self.k >= 2 && shared.is_none();
        let coord = if diagonal {
            let (a1, b1) = self.h1.big_arc(&p1)?;
            let (a2, b2) = self.h2.big_arc(&p2)?;
            let src = imgs
                .iter()
                .position(|c| c.0 == a1)
                .expect("projection member");
            let snk = imgs
                .iter()
                .position(|c| c.0 == b1)
                .expect("projection member");
            if imgs[src].1 != a2 || imgs[snk].1 != b2 {
                return Err(EmbedderError::InvariantBroken(
                    "projection tournaments order the attachment clique inconsistently".into(),
                ));
            }
            debug_assert_eq!(
                self.ledger.diagonal_record.get(&cs),
                Some(&((a1, b2), (b1, a2)))
            );
            let first = (a1, b2);
            let second = (b1, a2);
            if !self.ledger.used.contains(&first) {
                first
            } else if !self.ledger.used.contains(&second) {
                second
            } else {
                return Err(EmbedderError::InvariantBroken(
                    "both big siblings of a diagonal attachment are occupied".into(),
                ));
            }
        } else if shared.unwrap_or(true) {
            let wq = self.h2.sink(&p2)?;
            let x = self.h1.attach_vertex(&p1)?;
            (x, wq)
        } else {
            let vq = self.h1.sink(&p1)?;
            let y = self.h2.attach_vertex(&p2)?;
            (vq, y)
        };

        self.place(v, coord)?;
        let created = self.record_new_diagonals(v, &cs)?;
        debug_assert!(created <= 1);
        debug_assert!(!diagonal || created == 0);

        #[cfg(debug_assertions)]
        {
            for (&c, img) in cs.iter().zip(&imgs) {
                debug_assert!(
                    self.realized(coord, *img),
                    "edge to {} not realized at step for {}",
                    c,
                    v
                );
            }
            self.ledger
                .check(&self.g, &self.map)
                .unwrap_or_else(|m| panic!("ledger invariant: {}", m));
        }
        Ok(())
    }

    #[cfg(debug_assertions)]
    fn realized(&self, a: (Vertex, Vertex), b: (Vertex, Vertex)) -> bool {
        let h = |arcs: &BTreeSet<(Vertex, Vertex)>, x: Vertex, y: Vertex| {
            arcs.contains(&(x, y)) || arcs.contains(&(y, x))
        };
        (a.0 == b.0 && h(&self.h2.arcs, a.1, b.1))
            || (a.1 == b.1 && h(&self.h1.arcs, a.0, b.0))
            || (self.h1.arcs.contains(&(a.0, b.0)) && self.h2.arcs.contains(&(a.1, b.1)))
            || (self.h1.arcs.contains(&(b.0, a.0)) && self.h2.arcs.contains(&(b.1, a.1)))
    }
}

/// Embeds the graph described by a simple k-tree trace into a directed
/// product of two oriented hosts. Both hosts come with width witnesses;
/// indegrees and witness widths stay at most max(k-1, 1).
pub fn embed_simple_treewidth(trace: &ConstructionTrace) -> Result<Embedding, EmbedderError> {
    embed_simple_treewidth_with_ledger(trace).map(|(e, _)| e)
}

/// [`embed_simple_treewidth`] plus the final diagonal-clique ledger.
pub fn embed_simple_treewidth_with_ledger(
    trace: &ConstructionTrace,
) -> Result<(Embedding, SiblingLedger), EmbedderError> {
    trace
        .validate()
        .map_err(|e| EmbedderError::InvalidTrace(e.to_string()))?;
    if !trace.is_simple() {
        return Err(EmbedderError::InvalidTrace(
            "an attachment clique is used more than once".into(),
        ));
    }
    let k = trace.k;
    let g = trace
        .graph()
        .map_err(|e| EmbedderError::InvalidTrace(e.to_string()))?;

    let mut run = TraceRun {
        k,
        g,
        h1: HostBuilder::transitive_tournament(k),
        h2: HostBuilder::single_arc(),
        map: BTreeMap::new(),
        ledger: SiblingLedger::default(),
    };
    for (i, &b) in trace.base.iter().enumerate() {
        let coord = if i < k { (i, 0) } else { (k - 1, 1) };
        run.place(b, coord)?;
    }
    if k >= 2 {
        for drop in 0..trace.base.len() {
            let mut d = trace.base.clone();
            d.remove(drop);
            run.record_if_diagonal(d)?;
        }
    }
    for step in &trace.steps {
        run.step(step.v, &step.clique)?;
    }

    let emb = Embedding {
        host1: run.h1.digraph(),
        host2: run.h2.digraph(),
        map: run.map,
        witness1: Some(run.h1.witness()),
        witness2: Some(run.h2.witness()),
    };
    #[cfg(debug_assertions)]
    {
        let report = crate::products::verify_embedding(&run.g, &emb);
        debug_assert!(report.is_valid, "{:?}", report.violations);
    }
    Ok((emb, run.ledger))
}

/// Embeds an outerplanar graph into a directed product of two oriented
/// trees with all indegrees at most 1. Inputs that are not edge-maximal
/// are first completed to a triangulated polygon on the same vertices.
pub fn embed_outerplanar(g: &Graph) -> Result<Embedding, EmbedderError> {
    let n = g.vertex_count();
    if n <= 2 {
        let host1 = Digraph::new(2, [(0, 1)], true).expect("fixed host");
        let host2 = Digraph::new(1, [], true).expect("fixed host");
        let map: BTreeMap<Vertex, (Vertex, Vertex)> = (0..n).map(|v| (v, (v, 0))).collect();
        return Ok(Embedding {
            host1,
            host2,
            map,
            witness1: Some(TreeDecomposition {
                bags: vec![[0, 1].into_iter().collect()],
                tree_edges: BTreeSet::new(),
                root: Some(0),
            }),
            witness2: Some(TreeDecomposition {
                bags: vec![[0].into_iter().collect()],
                tree_edges: BTreeSet::new(),
                root: Some(0),
            }),
        });
    }
    let trace = match recognize_simple_ktree(g, 2) {
        Some(t) => t,
        None => completion_trace(g)?,
    };
    embed_simple_treewidth(&trace)
}

fn crossing(a: (usize, usize), b: (usize, usize)) -> bool {
    (a.0 < b.0 && b.0 < a.1 && a.1 < b.1) || (b.0 < a.0 && a.0 < b.1 && b.1 < a.1)
}

/// Trace of a maximal outerplanar supergraph of `g` on the same vertex
/// set, or an error if none exists. Lays every vertex on one polygon
/// (blocks keep their outer cycles, cut vertices splice them together),
/// then greedily completes the chord set to a triangulation.
fn completion_trace(g: &Graph) -> Result<ConstructionTrace, EmbedderError> {
    let n = g.vertex_count();
    let sigma = outer_layout(g)?;
    let mut pos = vec![0usize; n];
    for (i, &v) in sigma.iter().enumerate() {
        pos[v] = i;
    }

    let mut chords: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (u, v) in g.edges() {
        let (a, b) = (pos[u].min(pos[v]), pos[u].max(pos[v]));
        if b - a == 1 || (a == 0 && b == n - 1) {
            continue;
        }
        chords.insert((a, b));
    }
    let listed: Vec<(usize, usize)> = chords.iter().copied().collect();
    for i in 0..listed.len() {
        for j in i + 1..listed.len() {
            if crossing(listed[i], listed[j]) {
                return Err(EmbedderError::NotOuterplanar(
                    "edges cannot be drawn inside one face without crossing".into(),
                ));
            }
        }
    }

    for a in 0..n {
        for b in a + 2..n {
            if a == 0 && b == n - 1 {
                continue;
            }
            if chords.contains(&(a, b)) || chords.iter().any(|&c| crossing((a, b), c)) {
                continue;
            }
            chords.insert((a, b));
        }
    }

    let mut edges: BTreeSet<(Vertex, Vertex)> = g.edges().collect();
    for i in 0..n {
        let (u, v) = (sigma[i], sigma[(i + 1) % n]);
        edges.insert((u.min(v), u.max(v)));
    }
    for (a, b) in chords {
        let (u, v) = (sigma[a], sigma[b]);
        edges.insert((u.min(v), u.max(v)));
    }
    let gmax = Graph::new(n, edges).expect("positions map back to valid vertices");
    debug_assert_eq!(gmax.edge_count(), 2 * n - 3);
    recognize_simple_ktree(&gmax, 2).ok_or_else(|| {
        EmbedderError::InvariantBroken("triangulated polygon failed recognition".into())
    })
}

/// Cyclic vertex order placing every vertex on a single outer face:
/// each biconnected block contributes its outer cycle, blocks hanging off
/// a cut vertex are spliced in right after it, components are laid side
/// by side.
fn outer_layout(g: &Graph) -> Result<Vec<Vertex>, EmbedderError> {
    let n = g.vertex_count();
    let mut blocks = biconnected_blocks(g);
    blocks.sort();
    let mut cycles = Vec::with_capacity(blocks.len());
    for block in &blocks {
        cycles.push(if block.len() == 2 {
            block.iter().copied().collect()
        } else {
            block_outer_cycle(g, block)?
        });
    }
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, block) in blocks.iter().enumerate() {
        for &v in block {
            at[v].push(i);
        }
    }

    let mut sigma = Vec::with_capacity(n);
    let mut vdone = vec![false; n];
    let mut bdone = vec![false; blocks.len()];
    for r in 0..n {
        if !vdone[r] {
            walk_vertex(r, &at, &cycles, &mut sigma, &mut vdone, &mut bdone);
        }
    }
    Ok(sigma)
}

fn walk_vertex(
    v: Vertex,
    at: &[Vec<usize>],
    cycles: &[Vec<Vertex>],
    sigma: &mut Vec<Vertex>,
    vdone: &mut [bool],
    bdone: &mut [bool],
) {
    vdone[v] = true;
    sigma.push(v);
    for &bi in &at[v] {
        if bdone[bi] {
            continue;
        }
        bdone[bi] = true;
        let cycle = &cycles[bi];
        let m = cycle.len();
        let start = cycle.iter().position(|&x| x == v).expect("block member");
        let forward = cycle[(start + 1) % m];
        let backward = cycle[(start + m - 1) % m];
        let dir_forward = m == 2 || forward < backward;
        for step in 1..m {
            let w = if dir_forward {
                cycle[(start + step) % m]
            } else {
                cycle[(start + m - step) % m]
            };
            debug_assert!(!vdone[w]);
            walk_vertex(w, at, cycles, sigma, vdone, bdone);
        }
    }
}

/// The unique outer cycle of a biconnected graph laid out on one face:
/// an edge belongs to it exactly when deleting its endpoints leaves the
/// block connected.
fn block_outer_cycle(g: &Graph, block: &VertexSet) -> Result<Vec<Vertex>, EmbedderError> {
    let edges: Vec<(Vertex, Vertex)> = g
        .edges()
        .filter(|(u, v)| block.contains(u) && block.contains(v))
        .collect();
    let mut cyc_adj: BTreeMap<Vertex, Vec<Vertex>> =
        block.iter().map(|&v| (v, Vec::new())).collect();
    for &(u, v) in &edges {
        if connected_without(block, &edges, u, v) {
            cyc_adj.get_mut(&u).expect("block member").push(v);
            cyc_adj.get_mut(&v).expect("block member").push(u);
        }
    }
    for nbrs in cyc_adj.values_mut() {
        if nbrs.len() != 2 {
            return Err(EmbedderError::NotOuterplanar(
                "a biconnected piece has no outer cycle through every vertex".into(),
            ));
        }
        nbrs.sort_unstable();
    }
    let start = *block.iter().next().expect("blocks are nonempty");
    let mut order = vec![start];
    let mut prev = start;
    let mut cur = cyc_adj[&start][0];
    while cur != start {
        order.push(cur);
        let nbrs = &cyc_adj[&cur];
        let next = if nbrs[0] == prev { nbrs[1] } else { nbrs[0] };
        prev = cur;
        cur = next;
    }
    if order.len() != block.len() {
        return Err(EmbedderError::NotOuterplanar(
            "outer-face candidate edges split into several cycles".into(),
        ));
    }
    Ok(order)
}

fn connected_without(block: &VertexSet, edges: &[(Vertex, Vertex)], u: Vertex, v: Vertex) -> bool {
    let rest: Vec<Vertex> = block
        .iter()
        .copied()
        .filter(|&x| x != u && x != v)
        .collect();
    if rest.is_empty() {
        return true;
    }
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = rest.iter().map(|&x| (x, Vec::new())).collect();
    for &(a, b) in edges {
        if a != u && a != v && b != u && b != v {
            adj.get_mut(&a).expect("filtered").push(b);
            adj.get_mut(&b).expect("filtered").push(a);
        }
    }
    let mut seen: BTreeSet<Vertex> = [rest[0]].into_iter().collect();
    let mut queue = vec![rest[0]];
    while let Some(x) = queue.pop() {
        for &y in &adj[&x] {
            if seen.insert(y) {
                queue.push(y);
            }
        }
    }
    seen.len() == rest.len()
}

/// Vertex sets of the biconnected components; bridges appear as pairs,
/// isolated vertices do not appear at all.
fn biconnected_blocks(g: &Graph) -> Vec<VertexSet> {
    let n = g.vertex_count();
    let adj: Vec<Vec<Vertex>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut num = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut parent = vec![usize::MAX; n];
    let mut counter = 0usize;
    let mut estack: Vec<(Vertex, Vertex)> = Vec::new();
    let mut out = Vec::new();

    for start in 0..n {
        if num[start] != usize::MAX {
            continue;
        }
        num[start] = counter;
        low[start] = counter;
        counter += 1;
        let mut stack: Vec<(Vertex, usize)> = vec![(start, 0)];
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if num[w] == usize::MAX {
                    estack.push((v, w));
                    parent[w] = v;
                    num[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push((w, 0));
                } else if w != parent[v] && num[w] < num[v] {
                    estack.push((v, w));
                    low[v] = low[v].min(num[w]);
                }
            } else {
                stack.pop();
                if let Some(&mut (u, _)) = stack.last_mut() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= num[u] {
                        let mut members = VertexSet::new();
                        while let Some(&(a, b)) = estack.last() {
                            if num[a] >= num[v] || (a, b) == (u, v) {
                                members.insert(a);
                                members.insert(b);
                                estack.pop();
                                if (a, b) == (u, v) {
                                    break;
                                }
                            } else {
                                break;
                            }
                        }
                        out.push(members);
                    }
                }
            }
        }
    }
    out
}

/// Splits the vertices of a k-tree trace, k = p + q + 1, into a part of
/// treewidth at most p and one of treewidth at most q. The witnesses are
/// decompositions of the two induced subgraphs, relabelled to sorted
/// order within each part.
pub fn partition_by_treewidth(
    trace: &ConstructionTrace,
    p: usize,
    q: usize,
) -> Result<(VertexSet, VertexSet, TreeDecomposition, TreeDecomposition), EmbedderError> {
    trace
        .validate()
        .map_err(|e| EmbedderError::InvalidTrace(e.to_string()))?;
    if p + q + 1 != trace.k {
        return Err(EmbedderError::ArityMismatch(format!(
            "splitting a {}-tree needs p + q + 1 = {}, got p = {} and q = {}",
            trace.k, trace.k, p, q
        )));
    }
    let colors =
        rainbow_color_ktree(trace).map_err(|e| EmbedderError::InvalidTrace(e.to_string()))?;
    let n = trace.vertex_count();
    let v1: VertexSet = (0..n).filter(|&v| colors[v] <= p).collect();
    let v2: VertexSet = (0..n).filter(|&v| colors[v] > p).collect();
    let td = trace
        .decomposition()
        .map_err(|e| EmbedderError::InvalidTrace(e.to_string()))?;
    let w1 = restrict_relabel(&td, &v1);
    let w2 = restrict_relabel(&td, &v2);
    Ok((v1, v2, w1, w2))
}

fn restrict_relabel(td: &TreeDecomposition, part: &VertexSet) -> TreeDecomposition {
    let index: BTreeMap<Vertex, usize> = part.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    TreeDecomposition {
        bags: td
            .bags
            .iter()
            .map(|bag| bag.iter().filter_map(|v| index.get(v).copied()).collect())
            .collect(),
        tree_edges: td.tree_edges.clone(),
        root: td.root,
    }
}

/// Embeds `g` into the directed product of its two part-induced subgraphs,
/// each augmented with one dominant vertex. Arcs at the first dominant
/// vertex leave it, arcs at the second enter it, and every remaining edge
/// runs from the lower to the higher label.
pub fn embed_dominant(
    g: &Graph,
    v1: &VertexSet,
    v2: &VertexSet,
) -> Result<Embedding, EmbedderError> {
    let n = g.vertex_count();
    if let Some(&v) = v1.intersection(v2).next() {
        return Err(EmbedderError::NotAPartition(format!(
            "vertex {} is in both parts",
            v
        )));
    }
    for &v in v1.iter().chain(v2.iter()) {
        if v >= n {
            return Err(EmbedderError::NotAPartition(format!(
                "vertex {} is outside the graph",
                v
            )));
        }
    }
    if v1.len() + v2.len() != n {
        return Err(EmbedderError::NotAPartition(
            "parts do not cover every vertex".into(),
        ));
    }

    let pos1: BTreeMap<Vertex, usize> = v1.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let pos2: BTreeMap<Vertex, usize> = v2.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let r1 = v1.len();
    let r2 = v2.len();

    let mut arcs1: BTreeSet<(Vertex, Vertex)> = (0..r1).map(|i| (r1, i)).collect();
    let mut arcs2: BTreeSet<(Vertex, Vertex)> = (0..r2).map(|i| (i, r2)).collect();
    for (a, b) in g.edges() {
        if let (Some(&x), Some(&y)) = (pos1.get(&a), pos1.get(&b)) {
            arcs1.insert((x.min(y), x.max(y)));
        }
        if let (Some(&x), Some(&y)) = (pos2.get(&a), pos2.get(&b)) {
            arcs2.insert((x.min(y), x.max(y)));
        }
    }
    let host1 = Digraph::new(r1 + 1, arcs1, true).expect("one arc per unordered pair");
    let host2 = Digraph::new(r2 + 1, arcs2, true).expect("one arc per unordered pair");

    let mut map = BTreeMap::new();
    for (&v, &i) in &pos1 {
        map.insert(v, (i, r2));
    }
    for (&v, &i) in &pos2 {
        map.insert(v, (r1, i));
    }
    let emb = Embedding {
        host1,
        host2,
        map,
        witness1: None,
        witness2: None,
    };
    #[cfg(debug_assertions)]
    {
        let report = crate::products::verify_embedding(g, &emb);
        debug_assert!(report.is_valid, "{:?}", report.violations);
    }
    Ok(emb)
}

/// Embeds any k-tree trace with p + q >= k + 1, p, q >= 1: the vertex set
/// is split by treewidth, each part gains a dominant vertex, and the hosts
/// carry witnesses of width at most p and q.
pub fn embed_unbounded_indegree(
    trace: &ConstructionTrace,
    p: usize,
    q: usize,
) -> Result<Embedding, EmbedderError> {
    trace
        .validate()
        .map_err(|e| EmbedderError::InvalidTrace(e.to_string()))?;
    let k = trace.k;
    if p == 0 || q == 0 || p + q < k + 1 {
        return Err(EmbedderError::ArityMismatch(format!(
            "embedding a {}-tree needs p, q >= 1 with p + q >= {}, got p = {} and q = {}",
            k,
            k + 1,
            p,
            q
        )));
    }
    let a = (p - 1).min(k - 1);
    let b = k - 1 - a;
    let (v1, v2, w1, w2) = partition_by_treewidth(trace, a, b)?;
    let g = trace
        .graph()
        .map_err(|e| EmbedderError::InvalidTrace(e.to_string()))?;
    let mut emb = embed_dominant(&g, &v1, &v2)?;
    emb.witness1 = Some(with_everywhere(w1, v1.len()));
    emb.witness2 = Some(with_everywhere(w2, v2.len()));
    Ok(emb)
}

fn with_everywhere(mut td: TreeDecomposition, v: Vertex) -> TreeDecomposition {
    for bag in &mut td.bags {
        bag.insert(v);
    }
    td
}
