//! Brute-force ground truth at desk scale: exact treewidth, exact simple
//! treewidth, clique number, and an exhaustive embedding search.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::decomposition::{ConstructionTrace, TraceStep, TreeDecomposition};
use crate::graph::{Digraph, Graph, Vertex, VertexSet};
use crate::products::{verify_embedding, Embedding};

pub const TREEWIDTH_LIMIT: usize = 14;
pub const SIMPLE_TREEWIDTH_LIMIT: usize = 9;
pub const CLIQUE_LIMIT: usize = 30;
pub const SEARCH_GUEST_LIMIT: usize = 6;
pub const SEARCH_HOST_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("graph with {actual} vertices exceeds the oracle limit {limit}")]
    TooLarge { actual: usize, limit: usize },
    #[error("search budget too large: {0}")]
    BudgetTooLarge(String),
}

/// Exact treewidth by dynamic programming over elimination prefixes.
pub fn exact_treewidth(g: &Graph) -> Result<i64, OracleError> {
    exact_treewidth_witness(g).map(|(w, _)| w)
}

/// Exact treewidth plus an optimal decomposition built from the recovered
/// elimination order.
pub fn exact_treewidth_witness(g: &Graph) -> Result<(i64, TreeDecomposition), OracleError> {
    exact_treewidth_witness_with_limit(g, TREEWIDTH_LIMIT)
}

/// Same subset dynamic program with a caller-chosen size limit; memory grows
/// as 2^n, so limits beyond ~20 are rejected.
pub fn exact_treewidth_witness_with_limit(
    g: &Graph,
    limit: usize,
) -> Result<(i64, TreeDecomposition), OracleError> {
    let n = g.vertex_count();
    let limit = limit.min(20);
    if n > limit {
        return Err(OracleError::TooLarge { actual: n, limit });
    }
    if n == 0 {
        return Ok((
            -1,
            TreeDecomposition {
                bags: vec![VertexSet::new()],
                tree_edges: BTreeSet::new(),
                root: Some(0),
            },
        ));
    }

    // q(s, v): vertices outside s+v seen from v through s.
    let q = |s: u32, v: usize| -> u8 {
        let mut outside = 0u32;
        let mut visited = 1u32 << v;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &w in g.neighbors(x) {
                let bit = 1u32 << w;
                if s & bit != 0 {
                    if visited & bit == 0 {
                        visited |= bit;
                        stack.push(w);
                    }
                } else if w != v {
                    outside |= bit;
                }
            }
        }
        outside.count_ones() as u8
    };

    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = vec![u8::MAX; (full as usize) + 1];
    let mut choice = vec![u8::MAX; (full as usize) + 1];
    best[0] = 0;
    for s in 0..=full {
        if best[s as usize] == u8::MAX {
            continue;
        }
        for v in 0..n {
            let bit = 1u32 << v;
            if s & bit != 0 {
                continue;
            }
            let cand = best[s as usize].max(q(s, v));
            let t = (s | bit) as usize;
            if cand < best[t] {
                best[t] = cand;
                choice[t] = v as u8;
            }
        }
    }
    let width = best[full as usize] as i64;

    // Recover the elimination order, last-eliminated first.
    let mut order_rev = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s as usize] as usize;
        order_rev.push(v);
        s &= !(1u32 << v);
    }
    let order: Vec<usize> = order_rev.into_iter().rev().collect();

    // Eliminate with fill-in to collect the bags.
    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut adj: Vec<VertexSet> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut bags: Vec<VertexSet> = Vec::with_capacity(n);
    let mut tree_edges = BTreeSet::new();
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<Vertex> = adj[v]
            .iter()
            .copied()
            .filter(|&u| position[u] > i)
            .collect();
        let mut bag: VertexSet = later.iter().copied().collect();
        bag.insert(v);
        bags.push(bag);
        for a in 0..later.len() {
            for b in a + 1..later.len() {
                adj[later[a]].insert(later[b]);
                adj[later[b]].insert(later[a]);
            }
        }
        if let Some(&parent) = later.iter().min_by_key(|&&u| position[u]) {
            tree_edges.insert((i.min(position[parent]), i.max(position[parent])));
        } else if i + 1 < n {
            // Component exhausted; chain onto the next bag to keep one tree.
            tree_edges.insert((i, i + 1));
        }
    }
    let td = TreeDecomposition {
        bags,
        tree_edges,
        root: Some(n - 1),
    };
    Ok((width, td))
}

/// Pre-sized bit addressing for vertex pairs and k-subsets of `0..n`.
struct SubsetIndex {
    pair_bit: Vec<Vec<u32>>,
    clique_ids: BTreeMap<Vec<Vertex>, u32>,
}

impl SubsetIndex {
    fn new(n: usize, k: usize) -> Self {
        let mut pair_bit = vec![vec![0u32; n]; n];
        let mut next = 0;
        for u in 0..n {
            for v in u + 1..n {
                pair_bit[u][v] = next;
                pair_bit[v][u] = next;
                next += 1;
            }
        }
        let verts: Vec<Vertex> = (0..n).collect();
        let mut clique_ids = BTreeMap::new();
        let mut scratch = Vec::new();
        fn rec(
            verts: &[Vertex],
            k: usize,
            from: usize,
            scratch: &mut Vec<Vertex>,
            out: &mut BTreeMap<Vec<Vertex>, u32>,
        ) {
            if scratch.len() == k {
                let id = out.len() as u32;
                out.insert(scratch.clone(), id);
                return;
            }
            for i in from..verts.len() {
                scratch.push(verts[i]);
                rec(verts, k, i + 1, scratch, out);
                scratch.pop();
            }
        }
        rec(&verts, k, 0, &mut scratch, &mut clique_ids);
        SubsetIndex {
            pair_bit,
            clique_ids,
        }
    }
}

/// Trace of a simple k-tree on `V(g)` containing every edge of `g`, if one
/// exists.
fn simple_ktree_search(g: &Graph, k: usize) -> Option<ConstructionTrace> {
    let n = g.vertex_count();
    if n < k + 1 {
        return None;
    }
    let idx = SubsetIndex::new(n, k);
    let full: u16 = if n == 16 { u16::MAX } else { (1 << n) - 1 };
    let mut memo: HashSet<(u16, u64, u128)> = HashSet::new();

    fn k_subsets_containing(placed: &[Vertex], req: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
        let optional: Vec<Vertex> = placed
            .iter()
            .copied()
            .filter(|v| !req.contains(v))
            .collect();
        let need = k - req.len();
        let mut out = Vec::new();
        if need > optional.len() {
            return out;
        }
        let mut scratch = Vec::new();
        fn rec(
            optional: &[Vertex],
            need: usize,
            from: usize,
            scratch: &mut Vec<Vertex>,
            out: &mut Vec<Vec<Vertex>>,
        ) {
            if scratch.len() == need {
                out.push(scratch.clone());
                return;
            }
            for i in from..optional.len() {
                scratch.push(optional[i]);
                rec(optional, need, i + 1, scratch, out);
                scratch.pop();
            }
        }
        rec(&optional, need, 0, &mut scratch, &mut out);
        for c in &mut out {
            c.extend_from_slice(req);
            c.sort_unstable();
        }
        out.sort();
        out
    }

    struct Ctx<'a> {
        g: &'a Graph,
        n: usize,
        k: usize,
        idx: &'a SubsetIndex,
        full: u16,
    }

    fn dfs(
        ctx: &Ctx,
        mask: u16,
        edges: u64,
        used: u128,
        memo: &mut HashSet<(u16, u64, u128)>,
        steps: &mut Vec<TraceStep>,
    ) -> bool {
        if mask == ctx.full {
            return true;
        }
        if !memo.insert((mask, edges, used)) {
            return false;
        }
        let placed: Vec<Vertex> = (0..ctx.n).filter(|&v| mask & (1 << v) != 0).collect();
        for v in 0..ctx.n {
            if mask & (1 << v) != 0 {
                continue;
            }
            let req: Vec<Vertex> = ctx
                .g
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&u| mask & (1 << u) != 0)
                .collect();
            if req.len() > ctx.k {
                continue;
            }
            for c in k_subsets_containing(&placed, &req, ctx.k) {
                let cid = ctx.idx.clique_ids[&c];
                if used & (1u128 << cid) != 0 {
                    continue;
                }
                let is_clique = c.iter().enumerate().all(|(i, &a)| {
                    c[i + 1..]
                        .iter()
                        .all(|&b| edges & (1u64 << ctx.idx.pair_bit[a][b]) != 0)
                });
                if !is_clique {
                    continue;
                }
                let mut new_edges = edges;
                for &u in &c {
                    new_edges |= 1u64 << ctx.idx.pair_bit[u][v];
                }
                steps.push(TraceStep { v, clique: c });
                if dfs(
                    ctx,
                    mask | (1 << v),
                    new_edges,
                    used | (1u128 << cid),
                    memo,
                    steps,
                ) {
                    return true;
                }
                steps.pop();
            }
        }
        false
    }

    let ctx = Ctx {
        g,
        n,
        k,
        idx: &idx,
        full,
    };
    let verts: Vec<Vertex> = (0..n).collect();
    let mut base_scratch = Vec::new();
    let mut bases = Vec::new();
    fn bases_rec(
        verts: &[Vertex],
        k1: usize,
        from: usize,
        scratch: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        if scratch.len() == k1 {
            out.push(scratch.clone());
            return;
        }
        for i in from..verts.len() {
            scratch.push(verts[i]);
            bases_rec(verts, k1, i + 1, scratch, out);
            scratch.pop();
        }
    }
    bases_rec(&verts, k + 1, 0, &mut base_scratch, &mut bases);
    let mut steps: Vec<TraceStep> = Vec::new();
    for base in bases {
        let mut mask = 0u16;
        let mut edges = 0u64;
        for &v in &base {
            mask |= 1 << v;
        }
        for (i, &a) in base.iter().enumerate() {
            for &b in &base[i + 1..] {
                edges |= 1u64 << idx.pair_bit[a][b];
            }
        }
        if dfs(&ctx, mask, edges, 0, &mut memo, &mut steps) {
            let trace = ConstructionTrace { k, base, steps };
            debug_assert!(trace.validate().is_ok() && trace.is_simple());
            return Some(trace);
        }
        debug_assert!(steps.is_empty());
    }
    None
}

/// Exact simple treewidth: smallest k such that a simple k-tree on the
/// vertex set (padded with isolated vertices up to k+1) contains the graph.
pub fn exact_simple_treewidth(g: &Graph) -> Result<usize, OracleError> {
    if g.edge_count() == 0 && g.vertex_count() <= 2 {
        return Ok(0);
    }
    exact_simple_treewidth_witness(g).map(|(k, _)| k)
}

/// Exact simple treewidth together with a containing simple k-tree trace
/// over the padded vertex set. For edgeless graphs on at most 2 vertices
/// the reported width is 1 (the smallest family with a trace) rather than
/// the 0 that [`exact_simple_treewidth`] reports.
pub fn exact_simple_treewidth_witness(
    g: &Graph,
) -> Result<(usize, ConstructionTrace), OracleError> {
    let n = g.vertex_count();
    if n > SIMPLE_TREEWIDTH_LIMIT {
        return Err(OracleError::TooLarge {
            actual: n,
            limit: SIMPLE_TREEWIDTH_LIMIT,
        });
    }
    let tw = exact_treewidth(g)?.max(0) as usize;
    let mut k = tw.max(1);
    loop {
        let padded_n = n.max(k + 1);
        let padded = Graph::new(padded_n, g.edges()).expect("padding preserves edges");
        if let Some(trace) = simple_ktree_search(&padded, k) {
            return Ok((k, trace));
        }
        k += 1;
    }
}

/// Exact clique number by branch and bound over candidate extensions.
pub fn clique_number(g: &Graph) -> Result<usize, OracleError> {
    let n = g.vertex_count();
    if n > CLIQUE_LIMIT {
        return Err(OracleError::TooLarge {
            actual: n,
            limit: CLIQUE_LIMIT,
        });
    }
    fn expand(g: &Graph, current: usize, cand: &VertexSet, best: &mut usize) {
        if current + cand.len() <= *best {
            return;
        }
        if cand.is_empty() {
            *best = (*best).max(current);
            return;
        }
        let mut cand = cand.clone();
        while let Some(&v) = cand.iter().next() {
            if current + cand.len() <= *best {
                return;
            }
            cand.remove(&v);
            let next: VertexSet = cand.iter().copied().filter(|&u| g.has_edge(u, v)).collect();
            expand(g, current + 1, &next, best);
        }
    }
    let mut best = 0;
    let all: VertexSet = (0..n).collect();
    expand(g, 0, &all, &mut best);
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_host_size: usize,
    pub max_indegree1: usize,
    pub max_indegree2: usize,
    pub max_tw1: usize,
    pub max_tw2: usize,
    pub oriented_only: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum SearchOutcome {
    #[serde(rename = "EMBEDDABLE")]
    Embeddable { embedding: Embedding },
    #[serde(rename = "NON_EMBEDDABLE")]
    NonEmbeddable {
        budget: SearchBudget,
        host_pairs_tried: u64,
        injections_tried: u64,
    },
}

/// All digraphs with `1..=max_n` vertices up to isomorphism, smallest
/// canonical adjacency encoding first.
pub fn canonical_digraphs(max_n: usize) -> Vec<Digraph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let slots = n * (n - 1);
        let slot = |i: usize, j: usize| i * (n - 1) + if j < i { j } else { j - 1 };
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let mut ids: Vec<usize> = (0..n).collect();
        permutations(&mut ids, 0, &mut perms);
        let mut seen = BTreeSet::new();
        for code in 0u64..(1u64 << slots) {
            let mut canon = u64::MAX;
            for p in &perms {
                let mut enc = 0u64;
                for i in 0..n {
                    for j in 0..n {
                        if i != j && code & (1 << slot(i, j)) != 0 {
                            enc |= 1 << slot(p[i], p[j]);
                        }
                    }
                }
                canon = canon.min(enc);
            }
            seen.insert(canon);
        }
        for code in seen {
            let mut arcs = BTreeSet::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && code & (1 << slot(i, j)) != 0 {
                        arcs.insert((i, j));
                    }
                }
            }
            let oriented = !arcs.iter().any(|&(u, v)| arcs.contains(&(v, u)));
            out.push(Digraph::new(n, arcs, oriented).expect("decoded arcs are in range"));
        }
    }
    out
}

fn permutations(ids: &mut Vec<usize>, from: usize, out: &mut Vec<Vec<usize>>) {
    if from == ids.len() {
        out.push(ids.clone());
        return;
    }
    for i in from..ids.len() {
        ids.swap(from, i);
        permutations(ids, from + 1, out);
        ids.swap(from, i);
    }
}

/// Depth-first injection search of `g` into the directed product of a fixed
/// host pair. Returns the map if one exists; counts every attempted
/// placement.
fn injection_search(
    g: &Graph,
    h1: &Digraph,
    h2: &Digraph,
    nodes: &mut u64,
) -> Option<BTreeMap<Vertex, (Vertex, Vertex)>> {
    let n = g.vertex_count();
    let n1 = h1.vertex_count();
    let n2 = h2.vertex_count();
    if n1 * n2 < n {
        return None;
    }
    let mut map: Vec<Option<(Vertex, Vertex)>> = vec![None; n];
    let mut used = BTreeSet::new();

    fn ok_with_neighbors(
        g: &Graph,
        h1: &Digraph,
        h2: &Digraph,
        map: &[Option<(Vertex, Vertex)>],
        v: Vertex,
        coord: (Vertex, Vertex),
    ) -> bool {
        let (a1, b1) = coord;
        for &u in g.neighbors(v) {
            if let Some((a2, b2)) = map[u] {
                let realized = match (a1 == a2, b1 == b2) {
                    (true, true) => false,
                    (true, false) => h2.has_arc(b1, b2) || h2.has_arc(b2, b1),
                    (false, true) => h1.has_arc(a1, a2) || h1.has_arc(a2, a1),
                    (false, false) => {
                        (h1.has_arc(a1, a2) && h2.has_arc(b1, b2))
                            || (h1.has_arc(a2, a1) && h2.has_arc(b2, b1))
                    }
                };
                if !realized {
                    return false;
                }
            }
        }
        true
    }

    fn dfs(
        g: &Graph,
        h1: &Digraph,
        h2: &Digraph,
        v: Vertex,
        map: &mut Vec<Option<(Vertex, Vertex)>>,
        used: &mut BTreeSet<(Vertex, Vertex)>,
        nodes: &mut u64,
    ) -> bool {
        if v == g.vertex_count() {
            return true;
        }
        for a in 0..h1.vertex_count() {
            for b in 0..h2.vertex_count() {
                if used.contains(&(a, b)) {
                    continue;
                }
                *nodes += 1;
                if !ok_with_neighbors(g, h1, h2, map, v, (a, b)) {
                    continue;
                }
                map[v] = Some((a, b));
                used.insert((a, b));
                if dfs(g, h1, h2, v + 1, map, used, nodes) {
                    return true;
                }
                map[v] = None;
                used.remove(&(a, b));
            }
        }
        false
    }

    if dfs(g, h1, h2, 0, &mut map, &mut used, nodes) {
        Some(
            map.into_iter()
                .enumerate()
                .map(|(v, c)| (v, c.expect("complete map")))
                .collect(),
        )
    } else {
        None
    }
}

/// Searches every canonical host pair within the budget for a valid
/// embedding. Negative results report the exhausted search size.
pub fn exhaustive_embedding_search(
    g: &Graph,
    budget: &SearchBudget,
) -> Result<SearchOutcome, OracleError> {
    if g.vertex_count() > SEARCH_GUEST_LIMIT {
        return Err(OracleError::TooLarge {
            actual: g.vertex_count(),
            limit: SEARCH_GUEST_LIMIT,
        });
    }
    if budget.max_host_size > SEARCH_HOST_LIMIT {
        return Err(OracleError::BudgetTooLarge(format!(
            "max_host_size {} exceeds {}",
            budget.max_host_size, SEARCH_HOST_LIMIT
        )));
    }
    if budget.max_host_size == 0 {
        return Err(OracleError::BudgetTooLarge("max_host_size is zero".into()));
    }

    let omega = clique_number(g)?;
    let all = canonical_digraphs(budget.max_host_size);
    let eligible = |d: &Digraph, max_indeg: usize, max_tw: usize| -> bool {
        if budget.oriented_only && !d.is_oriented() {
            return false;
        }
        if d.max_indegree() > max_indeg {
            return false;
        }
        exact_treewidth(&d.underlying()).map_or(false, |tw| tw <= max_tw as i64)
    };
    let hosts1: Vec<&Digraph> = all
        .iter()
        .filter(|d| eligible(d, budget.max_indegree1, budget.max_tw1))
        .collect();
    let hosts2: Vec<&Digraph> = all
        .iter()
        .filter(|d| eligible(d, budget.max_indegree2, budget.max_tw2))
        .collect();

    let mut host_pairs_tried = 0u64;
    let mut injections_tried = 0u64;
    for h1 in &hosts1 {
        let w1 = clique_number(&h1.underlying())?;
        for h2 in &hosts2 {
            host_pairs_tried += 1;
            // Any clique must fit inside the product of host cliques.
            let w2 = clique_number(&h2.underlying())?;
            if w1 * w2 < omega {
                continue;
            }
            if let Some(map) = injection_search(g, h1, h2, &mut injections_tried) {
                let embedding = Embedding {
                    host1: (*h1).clone(),
                    host2: (*h2).clone(),
                    map,
                    witness1: None,
                    witness2: None,
                };
                debug_assert!(verify_embedding(g, &embedding).is_valid);
                return Ok(SearchOutcome::Embeddable { embedding });
            }
        }
    }
    Ok(SearchOutcome::NonEmbeddable {
        budget: budget.clone(),
        host_pairs_tried,
        injections_tried,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::verify_decomposition;

    fn xorshift(state: &mut u64) -> u64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state
    }

    fn random_graph(n: usize, density_mod: u64, state: &mut u64) -> Graph {
        let mut edges = BTreeSet::new();
        for u in 0..n {
            for v in u + 1..n {
                if xorshift(state) % density_mod == 0 {
                    edges.insert((u, v));
                }
            }
        }
        Graph::new(n, edges).unwrap()
    }

    fn kbar3(k: usize) -> Graph {
        let mut edges = BTreeSet::new();
        for u in 0..k {
            for v in u + 1..k {
                edges.insert((u, v));
            }
            for b in k..k + 3 {
                edges.insert((u, b));
            }
        }
        Graph::new(k + 3, edges).unwrap()
    }

    #[test]
    fn treewidth_of_known_graphs() {
        for n in 1..=6 {
            assert_eq!(exact_treewidth(&Graph::complete(n)).unwrap(), n as i64 - 1);
        }
        assert_eq!(exact_treewidth(&Graph::path(7)).unwrap(), 1);
        assert_eq!(exact_treewidth(&Graph::cycle(5)).unwrap(), 2);
        assert_eq!(exact_treewidth(&Graph::empty(4)).unwrap(), 0);
        assert_eq!(exact_treewidth(&kbar3(2)).unwrap(), 2);

        let star = Graph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(exact_treewidth(&star).unwrap(), 1);

        assert_eq!(
            exact_treewidth(&Graph::empty(15)).unwrap_err(),
            OracleError::TooLarge {
                actual: 15,
                limit: TREEWIDTH_LIMIT
            }
        );
    }

    #[test]
    fn treewidth_witness_is_valid_and_tight() {
        let mut state = 0x2545f4914f6cdd1du64;
        for _ in 0..40 {
            let g = random_graph(8, 2, &mut state);
            let (w, td) = exact_treewidth_witness(&g).unwrap();
            let report = verify_decomposition(&g, &td, w.max(0) as usize);
            assert!(report.is_valid, "{:?}", report.violations);
            assert_eq!(report.width, w);
        }
    }

    #[test]
    fn treewidth_matches_naive_elimination_minimum() {
        // Independent check: minimize the maximum back-degree over all
        // elimination orders directly.
        fn naive_tw(g: &Graph) -> i64 {
            let n = g.vertex_count();
            let mut order: Vec<usize> = (0..n).collect();
            let mut best = i64::MAX;
            fn go(g: &Graph, order: &mut Vec<usize>, from: usize, best: &mut i64) {
                if from == order.len() {
                    let mut adj: Vec<VertexSet> = (0..g.vertex_count())
                        .map(|v| g.neighbors(v).clone())
                        .collect();
                    let mut width = 0i64;
                    for &v in order.iter() {
                        let nb: Vec<usize> = adj[v].iter().copied().collect();
                        width = width.max(nb.len() as i64);
                        for i in 0..nb.len() {
                            for j in i + 1..nb.len() {
                                adj[nb[i]].insert(nb[j]);
                                adj[nb[j]].insert(nb[i]);
                            }
                            adj[nb[i]].remove(&v);
                        }
                        adj[v].clear();
                    }
                    *best = (*best).min(width);
                    return;
                }
                for i in from..order.len() {
                    order.swap(from, i);
                    go(g, order, from + 1, best);
                    order.swap(from, i);
                }
            }
            go(g, &mut order, 0, &mut best);
            if n == 0 {
                -1
            } else {
                best
            }
        }
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..25 {
            let g = random_graph(6, 2, &mut state);
            assert_eq!(exact_treewidth(&g).unwrap(), naive_tw(&g));
        }
    }

    #[test]
    fn simple_treewidth_of_known_graphs() {
        assert_eq!(exact_simple_treewidth(&Graph::path(5)).unwrap(), 1);
        assert_eq!(exact_simple_treewidth(&Graph::complete(4)).unwrap(), 3);
        assert_eq!(exact_simple_treewidth(&Graph::cycle(4)).unwrap(), 2);
        assert_eq!(exact_simple_treewidth(&kbar3(2)).unwrap(), 3);
        assert_eq!(exact_simple_treewidth(&kbar3(1)).unwrap(), 2);

        assert_eq!(exact_simple_treewidth(&Graph::empty(1)).unwrap(), 0);
        assert_eq!(exact_simple_treewidth(&Graph::empty(2)).unwrap(), 0);
        assert_eq!(exact_simple_treewidth(&Graph::empty(3)).unwrap(), 1);
        assert_eq!(exact_simple_treewidth(&Graph::complete(2)).unwrap(), 1);

        assert_eq!(
            exact_simple_treewidth(&Graph::empty(10)).unwrap_err(),
            OracleError::TooLarge {
                actual: 10,
                limit: SIMPLE_TREEWIDTH_LIMIT
            }
        );
    }

    #[test]
    fn simple_treewidth_witness_traces_contain_the_graph() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..20 {
            let g = random_graph(6, 2, &mut state);
            let (k, trace) = exact_simple_treewidth_witness(&g).unwrap();
            assert_eq!(trace.k, k);
            assert!(trace.validate().is_ok());
            assert!(trace.is_simple());
            let host = trace.graph().unwrap();
            assert!(host.vertex_count() >= g.vertex_count());
            for (u, v) in g.edges() {
                assert!(host.has_edge(u, v));
            }
            if !(g.edge_count() == 0 && g.vertex_count() <= 2) {
                assert_eq!(k, exact_simple_treewidth(&g).unwrap());
            }
        }
        let (k, trace) = exact_simple_treewidth_witness(&Graph::empty(2)).unwrap();
        assert_eq!(k, 1);
        assert_eq!(trace.vertex_count(), 2);
    }

    #[test]
    fn simple_treewidth_between_tw_and_tw_plus_one() {
        let mut state = 0x6a09e667f3bcc909u64;
        for _ in 0..30 {
            let g = random_graph(6, 2, &mut state);
            let tw = exact_treewidth(&g).unwrap();
            let stw = exact_simple_treewidth(&g).unwrap() as i64;
            if g.edge_count() == 0 && g.vertex_count() <= 2 {
                continue;
            }
            assert!(
                stw == tw.max(1) || stw == tw + 1,
                "tw={} stw={} edges={:?}",
                tw,
                stw,
                g.edges().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn clique_numbers() {
        for n in 1..=6 {
            assert_eq!(clique_number(&Graph::complete(n)).unwrap(), n);
        }
        assert_eq!(clique_number(&Graph::empty(5)).unwrap(), 1);
        assert_eq!(clique_number(&Graph::empty(0)).unwrap(), 0);
        assert_eq!(clique_number(&Graph::cycle(6)).unwrap(), 2);
        assert_eq!(clique_number(&kbar3(2)).unwrap(), 3);

        let mut state = 0xbb67ae8584caa73bu64;
        for _ in 0..20 {
            let g = random_graph(7, 2, &mut state);
            let omega = clique_number(&g).unwrap();
            if omega > 0 {
                assert!(!g.cliques_of_size(omega).is_empty());
            }
            assert!(g.cliques_of_size(omega + 1).is_empty());
        }
    }

    #[test]
    fn canonical_digraph_counts() {
        let all = canonical_digraphs(2);
        // One empty digraph on 1 vertex; on 2 vertices: empty, single arc,
        // anti-parallel pair.
        assert_eq!(all.len(), 1 + 3);
        let sizes: Vec<usize> = all.iter().map(|d| d.vertex_count()).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2]);

        // Count on 3 vertices matches the known number of unlabeled
        // digraphs.
        let count3 = canonical_digraphs(3)
            .iter()
            .filter(|d| d.vertex_count() == 3)
            .count();
        assert_eq!(count3, 16);
    }

    fn budget(host: usize, indeg: usize, tw: usize, oriented: bool) -> SearchBudget {
        SearchBudget {
            max_host_size: host,
            max_indegree1: indeg,
            max_indegree2: indeg,
            max_tw1: tw,
            max_tw2: tw,
            oriented_only: oriented,
        }
    }

    #[test]
    fn k4_embeds_only_with_antiparallel_hosts() {
        let k4 = Graph::complete(4);
        match exhaustive_embedding_search(&k4, &budget(2, 1, 1, false)).unwrap() {
            SearchOutcome::Embeddable { embedding } => {
                assert!(verify_embedding(&k4, &embedding).is_valid);
                assert_eq!(embedding.host1.vertex_count(), 2);
                assert_eq!(embedding.host2.vertex_count(), 2);
                // Both product diagonals are needed, so at least one host
                // must carry an anti-parallel pair.
                assert!(!embedding.host1.is_oriented() || !embedding.host2.is_oriented());
            }
            other => panic!("expected embeddable, got {:?}", other),
        }
        match exhaustive_embedding_search(&k4, &budget(2, 1, 1, true)).unwrap() {
            SearchOutcome::NonEmbeddable {
                host_pairs_tried, ..
            } => assert!(host_pairs_tried > 0),
            other => panic!("expected non-embeddable, got {:?}", other),
        }
    }

    #[test]
    fn edgeless_hosts_embed_nothing_with_edges() {
        let p2 = Graph::path(2);
        match exhaustive_embedding_search(&p2, &budget(3, 2, 0, false)).unwrap() {
            SearchOutcome::NonEmbeddable { .. } => {}
            other => panic!("expected non-embeddable, got {:?}", other),
        }
    }

    #[test]
    fn search_certificates_verify_and_reproduce() {
        let g = Graph::path(3);
        let b = budget(2, 1, 1, true);
        let first = exhaustive_embedding_search(&g, &b).unwrap();
        let second = exhaustive_embedding_search(&g, &b).unwrap();
        assert_eq!(
            serde_json::to_string(&first).unwrap(),
            serde_json::to_string(&second).unwrap()
        );
        if let SearchOutcome::Embeddable { embedding } = first {
            assert!(verify_embedding(&g, &embedding).is_valid);
        } else {
            panic!("path should embed into single arcs");
        }

        assert!(matches!(
            exhaustive_embedding_search(&Graph::empty(7), &b),
            Err(OracleError::TooLarge { .. })
        ));
        assert!(matches!(
            exhaustive_embedding_search(&g, &budget(5, 1, 1, true)),
            Err(OracleError::BudgetTooLarge(_))
        ));
    }

    #[test]
    fn simple_treewidth_search_finds_traced_width() {
        // Graphs traced as simple k-trees have simple treewidth exactly k.
        let trace = crate::decomposition::ConstructionTrace {
            k: 2,
            base: vec![0, 1, 2],
            steps: vec![
                crate::decomposition::TraceStep {
                    v: 3,
                    clique: vec![0, 1],
                },
                crate::decomposition::TraceStep {
                    v: 4,
                    clique: vec![1, 2],
                },
                crate::decomposition::TraceStep {
                    v: 5,
                    clique: vec![1, 3],
                },
            ],
        };
        let g = trace.graph().unwrap();
        assert_eq!(exact_simple_treewidth(&g).unwrap(), 2);
    }
}
