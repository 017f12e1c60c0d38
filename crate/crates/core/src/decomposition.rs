//! Tree decompositions, k-tree construction traces, and the local-improvement
//! pipeline that turns a k-simple decomposition into a normal k-smooth one.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompositionError {
    #[error("decomposition has no root")]
    Unrooted,
    #[error("decomposition is not a valid k-simple decomposition of the graph")]
    NotSimple,
    #[error("graph too small: need at least k+1 vertices")]
    TooSmall,
    #[error("normalization stalled before reaching a smooth decomposition")]
    NormalizationStuck,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid construction trace: {0}")]
    InvalidTrace(String),
    #[error("decomposition width {width} exceeds bound {bound}")]
    WidthExceeded { width: i64, bound: usize },
}

/// Tree decomposition with optional root. `bags[i]` is the bag of node `i`;
/// `tree_edges` holds normalized node pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DecompositionWire", into = "DecompositionWire")]
pub struct TreeDecomposition {
    pub bags: Vec<VertexSet>,
    pub tree_edges: BTreeSet<(usize, usize)>,
    pub root: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionWire {
    nodes: usize,
    tree_edges: Vec<(usize, usize)>,
    bags: Vec<Vec<Vertex>>,
    root: Option<usize>,
}

impl From<TreeDecomposition> for DecompositionWire {
    fn from(td: TreeDecomposition) -> Self {
        DecompositionWire {
            nodes: td.bags.len(),
            tree_edges: td.tree_edges.iter().copied().collect(),
            bags: td
                .bags
                .iter()
                .map(|b| b.iter().copied().collect())
                .collect(),
            root: td.root,
        }
    }
}

impl TryFrom<DecompositionWire> for TreeDecomposition {
    type Error = String;
    fn try_from(w: DecompositionWire) -> Result<Self, String> {
        if w.bags.len() != w.nodes {
            return Err(format!(
                "node count {} does not match {} bags",
                w.nodes,
                w.bags.len()
            ));
        }
        let mut tree_edges = BTreeSet::new();
        for (a, b) in w.tree_edges {
            if a >= w.nodes || b >= w.nodes {
                return Err(format!("tree edge [{}, {}] references missing node", a, b));
            }
            if a == b {
                return Err(format!("tree edge [{}, {}] is a self-loop", a, b));
            }
            if !tree_edges.insert((a.min(b), a.max(b))) {
                return Err(format!("duplicate tree edge [{}, {}]", a, b));
            }
        }
        if let Some(r) = w.root {
            if r >= w.nodes {
                return Err(format!("root {} references missing node", r));
            }
        }
        Ok(TreeDecomposition {
            bags: w
                .bags
                .into_iter()
                .map(|b| b.into_iter().collect())
                .collect(),
            tree_edges,
            root: w.root,
        })
    }
}

impl TreeDecomposition {
    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    pub fn width(&self) -> i64 {
        self.bags
            .iter()
            .map(|b| b.len() as i64 - 1)
            .max()
            .unwrap_or(-1)
    }

    fn node_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    /// Whether node ids, edge endpoints and edge count form one connected tree.
    pub fn is_tree(&self) -> bool {
        let m = self.bags.len();
        if m == 0 {
            return false;
        }
        if self.tree_edges.len() != m - 1 {
            return false;
        }
        if self.tree_edges.iter().any(|&(a, b)| a >= m || b >= m) {
            return false;
        }
        let adj = self.node_adjacency();
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == m
    }
}

/// Parent/child/depth view of a rooted decomposition tree.
struct Rooted {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    bfs: Vec<usize>,
}

fn root_at(td: &TreeDecomposition, root: usize) -> Option<Rooted> {
    let m = td.bags.len();
    if root >= m || !td.is_tree() {
        return None;
    }
    let adj = td.node_adjacency();
    let mut parent = vec![None; m];
    let mut children = vec![Vec::new(); m];
    let mut depth = vec![0usize; m];
    let mut bfs = Vec::with_capacity(m);
    let mut seen = vec![false; m];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(root);
    seen[root] = true;
    while let Some(x) = queue.pop_front() {
        bfs.push(x);
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(x);
                children[x].push(y);
                depth[y] = depth[x] + 1;
                queue.push_back(y);
            }
        }
    }
    if bfs.len() != m {
        return None;
    }
    Some(Rooted {
        parent,
        children,
        depth,
        bfs,
    })
}

/// Verification report; each false field has a human-readable witness in
/// `violations`.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub is_valid: bool,
    pub width: i64,
    pub is_normal: bool,
    pub is_k_simple: bool,
    pub is_k_smooth: bool,
    pub is_k_fine: bool,
    pub violations: Vec<String>,
}

/// Checks validity plus the normal / k-simple / k-smooth / k-fine predicates.
pub fn verify_decomposition(g: &Graph, td: &TreeDecomposition, k: usize) -> DecompositionReport {
    let mut violations = Vec::new();
    let m = td.bags.len();
    let n = g.vertex_count();
    let mut is_valid = true;

    if m == 0 {
        is_valid = false;
        violations.push("decomposition has no nodes".to_string());
    }
    if !td.is_tree() {
        is_valid = false;
        violations.push("tree edges do not form a single tree".to_string());
    }
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                is_valid = false;
                violations.push(format!("bag {} contains out-of-range vertex {}", i, v));
            }
        }
    }

    // Every vertex covered and its bag set connected in the tree.
    let tree_ok = td.is_tree();
    for v in 0..n {
        let holding: Vec<usize> = (0..m).filter(|&i| td.bags[i].contains(&v)).collect();
        if holding.is_empty() {
            is_valid = false;
            violations.push(format!("vertex {} is in no bag", v));
            continue;
        }
        if tree_ok && holding.len() > 1 {
            let holding_set: BTreeSet<usize> = holding.iter().copied().collect();
            let adj = td.node_adjacency();
            let mut seen = BTreeSet::new();
            let mut stack = vec![holding[0]];
            seen.insert(holding[0]);
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if holding_set.contains(&y) && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != holding.len() {
                is_valid = false;
                violations.push(format!("bags containing vertex {} are not connected", v));
            }
        }
    }

    for (u, v) in g.edges() {
        if !(0..m).any(|i| td.bags[i].contains(&u) && td.bags[i].contains(&v)) {
            is_valid = false;
            violations.push(format!("edge [{}, {}] is covered by no bag", u, v));
        }
    }

    let width = td.width();

    let mut is_normal = true;
    'normal: for i in 0..m {
        for j in 0..m {
            if i != j && td.bags[i].is_subset(&td.bags[j]) {
                is_normal = false;
                violations.push(format!("bag {} is contained in bag {}", i, j));
                break 'normal;
            }
        }
    }

    let mut is_k_simple = true;
    if width > k as i64 {
        is_k_simple = false;
        violations.push(format!(
            "width {} exceeds {} so k-simplicity fails",
            width, k
        ));
    } else if k >= 1 {
        let mut counts: std::collections::BTreeMap<Vec<Vertex>, usize> =
            std::collections::BTreeMap::new();
        for bag in &td.bags {
            let verts: Vec<Vertex> = bag.iter().copied().collect();
            for subset in k_subsets(&verts, k) {
                *counts.entry(subset).or_insert(0) += 1;
            }
        }
        if let Some((s, c)) = counts.iter().find(|(_, &c)| c > 2) {
            is_k_simple = false;
            violations.push(format!("{:?} appears in {} bags", s, c));
        }
    }

    let mut is_k_smooth = true;
    for (i, bag) in td.bags.iter().enumerate() {
        if bag.len() != k + 1 {
            is_k_smooth = false;
            violations.push(format!(
                "bag {} has size {}, expected {}",
                i,
                bag.len(),
                k + 1
            ));
            break;
        }
    }
    if is_k_smooth {
        for &(a, b) in &td.tree_edges {
            let shared = td.bags[a].intersection(&td.bags[b]).count();
            if shared != k {
                is_k_smooth = false;
                violations.push(format!(
                    "adjacent bags {} and {} share {} vertices, expected {}",
                    a, b, shared, k
                ));
                break;
            }
        }
    }

    let is_k_fine = match td.root {
        Some(r) if r < m => {
            if td.bags[r].len() == k + 1 {
                true
            } else {
                violations.push(format!(
                    "root bag has size {}, expected {}",
                    td.bags[r].len(),
                    k + 1
                ));
                false
            }
        }
        _ => {
            violations.push("no root node".to_string());
            false
        }
    };

    DecompositionReport {
        is_valid,
        width,
        is_normal,
        is_k_simple,
        is_k_smooth,
        is_k_fine,
        violations,
    }
}

fn k_subsets(verts: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    if k == 0 || k > verts.len() {
        return out;
    }
    let mut scratch = Vec::with_capacity(k);
    fn rec(
        verts: &[Vertex],
        k: usize,
        from: usize,
        scratch: &mut Vec<Vertex>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        if scratch.len() == k {
            out.push(scratch.clone());
            return;
        }
        for i in from..verts.len() {
            if verts.len() - i < k - scratch.len() {
                break;
            }
            scratch.push(verts[i]);
            rec(verts, k, i + 1, scratch, out);
            scratch.pop();
        }
    }
    rec(verts, k, 0, &mut scratch, &mut out);
    out
}

/// Node ids of all bags containing `s`, ascending.
pub fn nodes_containing(td: &TreeDecomposition, s: &VertexSet) -> Vec<usize> {
    (0..td.bags.len())
        .filter(|&i| s.is_subset(&td.bags[i]))
        .collect()
}

/// Sum over nodes of `(depth + 1) * |bag|` in the rooted tree.
pub fn score(td: &TreeDecomposition) -> Result<u64, DecompositionError> {
    let root = td.root.ok_or(DecompositionError::Unrooted)?;
    let rooted = root_at(td, root).ok_or_else(|| {
        DecompositionError::PreconditionViolated("tree edges do not form a tree".to_string())
    })?;
    Ok((0..td.bags.len())
        .map(|i| (rooted.depth[i] as u64 + 1) * td.bags[i].len() as u64)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MoveKind {
    Contract,
    GrowMaxBag,
    RebalanceRehang,
    DeepenRehang,
    BagFill,
    EdgeSubdivision,
}

/// One applied normalization move together with the state it produced.
#[derive(Debug, Clone, Serialize)]
pub struct NormalizeStep {
    pub move_kind: MoveKind,
    pub bag_count: usize,
    pub score: u64,
}

/// Removes node `x`, splicing its neighbors onto `y`. Requires `x != y`.
fn contract_node(td: &mut TreeDecomposition, x: usize, y: usize) {
    let neighbors: Vec<usize> = td
        .tree_edges
        .iter()
        .filter(|&&(a, b)| a == x || b == x)
        .map(|&(a, b)| if a == x { b } else { a })
        .collect();
    td.tree_edges.retain(|&(a, b)| a != x && b != x);
    for nb in neighbors {
        if nb != y {
            td.tree_edges.insert((nb.min(y), nb.max(y)));
        }
    }
    let last = td.bags.len() - 1;
    let reindex = |i: usize| {
        if i == x {
            usize::MAX
        } else if i == last {
            x
        } else {
            i
        }
    };
    // Swap-remove keeps ids dense: the last node takes over id x.
    td.bags.swap_remove(x);
    let edges: Vec<(usize, usize)> = td.tree_edges.iter().copied().collect();
    td.tree_edges = edges
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = (reindex(a), reindex(b));
            (a.min(b), a.max(b))
        })
        .collect();
    td.root = td.root.map(|r| {
        let r = reindex(r);
        if r == usize::MAX {
            // Root was contracted away; its absorber takes over.
            reindex(y)
        } else {
            r
        }
    });
}

fn find_subsumed_edge(td: &TreeDecomposition) -> Option<(usize, usize)> {
    for &(a, b) in &td.tree_edges {
        if td.bags[a].is_subset(&td.bags[b]) {
            return Some((a, b));
        }
        if td.bags[b].is_subset(&td.bags[a]) {
            return Some((b, a));
        }
    }
    None
}

/// Counts the nodes whose bag contains `s`, with node `extra` treated as if
/// its bag were `extra_bag`.
fn phi_count_with(
    td: &TreeDecomposition,
    s: &[Vertex],
    extra: Option<(usize, &VertexSet)>,
) -> usize {
    let mut count = 0;
    for (i, bag) in td.bags.iter().enumerate() {
        let bag = match extra {
            Some((x, replacement)) if x == i => replacement,
            _ => bag,
        };
        if s.iter().all(|v| bag.contains(v)) {
            count += 1;
        }
    }
    if let Some((x, _)) = extra {
        if x >= td.bags.len() {
            // A brand new node.
            let replacement = extra.unwrap().1;
            if s.iter().all(|v| replacement.contains(v)) {
                count += 1;
            }
        }
    }
    count
}

/// Whether replacing (or adding) node `x` with bag `candidate` keeps the bag
/// family normal and k-simple.
fn bag_change_ok(td: &TreeDecomposition, x: usize, candidate: &VertexSet, k: usize) -> bool {
    if candidate.len() > k + 1 {
        return false;
    }
    for (i, bag) in td.bags.iter().enumerate() {
        if i == x {
            continue;
        }
        if bag.is_subset(candidate) || candidate.is_subset(bag) {
            return false;
        }
    }
    let verts: Vec<Vertex> = candidate.iter().copied().collect();
    for s in k_subsets(&verts, k) {
        if phi_count_with(td, &s, Some((x, candidate))) > 2 {
            return false;
        }
    }
    true
}

fn subtree_weights(td: &TreeDecomposition, rooted: &Rooted) -> Vec<u64> {
    let mut w: Vec<u64> = td.bags.iter().map(|b| b.len() as u64).collect();
    for &x in rooted.bfs.iter().rev() {
        for &c in &rooted.children[x] {
            w[x] += w[c];
        }
    }
    w
}

/// Turns a valid k-simple decomposition into a normal k-simple k-smooth one
/// by score-increasing local moves. See `normalize_to_smooth_simple_logged`
/// for the applied move log.
pub fn normalize_to_smooth_simple(
    g: &Graph,
    td: &TreeDecomposition,
    k: usize,
) -> Result<TreeDecomposition, DecompositionError> {
    normalize_to_smooth_simple_logged(g, td, k).map(|(out, _)| out)
}

pub fn normalize_to_smooth_simple_logged(
    g: &Graph,
    td: &TreeDecomposition,
    k: usize,
) -> Result<(TreeDecomposition, Vec<NormalizeStep>), DecompositionError> {
    let n = g.vertex_count();
    if n < k + 1 {
        return Err(DecompositionError::TooSmall);
    }
    let entry = verify_decomposition(g, td, k);
    if !entry.is_valid || !entry.is_k_simple {
        return Err(DecompositionError::NotSimple);
    }

    let mut work = td.clone();
    let mut log = Vec::new();
    let iter_limit = 4 * (k + 2) * (n + 2) * (n + 2) + 64;

    let log_state = |work: &TreeDecomposition, kind: MoveKind, log: &mut Vec<NormalizeStep>| {
        let s = work.root.and_then(|_| score(work).ok()).unwrap_or(0);
        log.push(NormalizeStep {
            move_kind: kind,
            bag_count: work.bags.len(),
            score: s,
        });
    };

    // Subsumed bags are contracted away, then a maximum bag is grown to size
    // k+1 one vertex at a time; both preserve validity and k-simplicity.
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if iterations > iter_limit {
            return Err(DecompositionError::NormalizationStuck);
        }
        if let Some((x, y)) = find_subsumed_edge(&work) {
            contract_node(&mut work, x, y);
            log_state(&work, MoveKind::Contract, &mut log);
            continue;
        }
        let max_size = work.bags.iter().map(|b| b.len()).max().unwrap_or(0);
        if max_size <= k {
            let x = (0..work.bags.len())
                .find(|&i| work.bags[i].len() == max_size)
                .unwrap();
            let adj = work.node_adjacency();
            let mut grown = false;
            for &y in &adj[x] {
                if let Some(&v) = work.bags[y].difference(&work.bags[x]).next() {
                    work.bags[x].insert(v);
                    log_state(&work, MoveKind::GrowMaxBag, &mut log);
                    grown = true;
                    break;
                }
            }
            if !grown {
                return Err(DecompositionError::NormalizationStuck);
            }
            continue;
        }
        break;
    }

    // Root at a (k+1)-bag, keeping an existing suitable root.
    let root_ok =
        matches!(work.root, Some(r) if r < work.bags.len() && work.bags[r].len() == k + 1);
    if !root_ok {
        let r = (0..work.bags.len())
            .find(|&i| work.bags[i].len() == k + 1)
            .ok_or(DecompositionError::NormalizationStuck)?;
        work.root = Some(r);
    }

    // Score-increasing moves until none applies.
    loop {
        iterations += 1;
        if iterations > iter_limit {
            return Err(DecompositionError::NormalizationStuck);
        }
        if let Some((x, y)) = find_subsumed_edge(&work) {
            contract_node(&mut work, x, y);
            log_state(&work, MoveKind::Contract, &mut log);
            continue;
        }
        let root = work.root.unwrap();
        let rooted = match root_at(&work, root) {
            Some(r) => r,
            None => return Err(DecompositionError::NormalizationStuck),
        };
        let weights = subtree_weights(&work, &rooted);
        let m = work.bags.len();

        let mut applied = None;

        // Detach a subtree from its parent and hang it below one of its own
        // children; pays off when the child's subtree is light.
        'rebalance: for x in 0..m {
            let y = match rooted.parent[x] {
                Some(y) => y,
                None => continue,
            };
            let s: VertexSet = work.bags[x].intersection(&work.bags[y]).copied().collect();
            for &z in &rooted.children[x] {
                if s.is_subset(&work.bags[z]) && weights[x] > 2 * weights[z] {
                    work.tree_edges.remove(&(x.min(y), x.max(y)));
                    work.tree_edges.insert((y.min(z), y.max(z)));
                    applied = Some(MoveKind::RebalanceRehang);
                    break 'rebalance;
                }
            }
        }

        // Re-hang a child below a sibling whose bag covers the interface.
        if applied.is_none() {
            'deepen: for y in 0..m {
                for &x in &rooted.children[y] {
                    let s: VertexSet = work.bags[x].intersection(&work.bags[y]).copied().collect();
                    for &z in &rooted.children[y] {
                        if z != x && s.is_subset(&work.bags[z]) {
                            work.tree_edges.remove(&(x.min(y), x.max(y)));
                            work.tree_edges.insert((x.min(z), x.max(z)));
                            applied = Some(MoveKind::DeepenRehang);
                            break 'deepen;
                        }
                    }
                }
            }
        }

        // Copy a vertex from a neighboring bag into an undersized bag.
        if applied.is_none() {
            let adj = work.node_adjacency();
            'fill: for x in 0..m {
                if work.bags[x].len() > k {
                    continue;
                }
                for &y in &adj[x] {
                    let missing: Vec<Vertex> =
                        work.bags[y].difference(&work.bags[x]).copied().collect();
                    for v in missing {
                        let mut candidate = work.bags[x].clone();
                        candidate.insert(v);
                        if bag_change_ok(&work, x, &candidate, k) {
                            work.bags[x] = candidate;
                            applied = Some(MoveKind::BagFill);
                            break 'fill;
                        }
                    }
                }
            }
        }

        // Split a tree edge with a fresh bag straddling both sides.
        if applied.is_none() {
            let edges: Vec<(usize, usize)> = work.tree_edges.iter().copied().collect();
            'subdivide: for (a, b) in edges {
                let (x, y) = if rooted.depth[a] > rooted.depth[b] {
                    (a, b)
                } else {
                    (b, a)
                };
                let inter: VertexSet = work.bags[x].intersection(&work.bags[y]).copied().collect();
                if inter.len() + 2 > k + 1 {
                    continue;
                }
                let from_x: Vec<Vertex> = work.bags[x].difference(&work.bags[y]).copied().collect();
                let from_y: Vec<Vertex> = work.bags[y].difference(&work.bags[x]).copied().collect();
                for &u in &from_x {
                    for &v in &from_y {
                        let mut candidate = inter.clone();
                        candidate.insert(u);
                        candidate.insert(v);
                        let fresh = work.bags.len();
                        if bag_change_ok(&work, fresh, &candidate, k) {
                            work.bags.push(candidate);
                            work.tree_edges.remove(&(x.min(y), x.max(y)));
                            work.tree_edges.insert((x.min(fresh), x.max(fresh)));
                            work.tree_edges.insert((y.min(fresh), y.max(fresh)));
                            applied = Some(MoveKind::EdgeSubdivision);
                            break 'subdivide;
                        }
                    }
                }
            }
        }

        match applied {
            Some(kind) => log_state(&work, kind, &mut log),
            None => break,
        }
    }

    let out = verify_decomposition(g, &work, k);
    if !(out.is_valid && out.is_normal && out.is_k_simple && out.is_k_smooth && out.is_k_fine) {
        return Err(DecompositionError::NormalizationStuck);
    }
    Ok((work, log))
}

/// One attachment step of a k-tree construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub v: Vertex,
    pub clique: Vec<Vertex>,
}

/// A k-tree construction order: a base (k+1)-clique followed by vertices
/// attached to existing k-cliques.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub k: usize,
    pub base: Vec<Vertex>,
    pub steps: Vec<TraceStep>,
}

impl ConstructionTrace {
    pub fn vertex_count(&self) -> usize {
        self.base.len() + self.steps.len()
    }

    /// Checks base size, vertex freshness, dense coverage of `0..n`, and that
    /// every attachment set is a k-clique of the graph built so far.
    pub fn validate(&self) -> Result<(), DecompositionError> {
        if self.k == 0 {
            return Err(DecompositionError::InvalidTrace(
                "k must be at least 1".into(),
            ));
        }
        let k = self.k;
        if self.base.len() != k + 1 {
            return Err(DecompositionError::InvalidTrace(format!(
                "base has {} vertices, expected {}",
                self.base.len(),
                k + 1
            )));
        }
        let n = self.vertex_count();
        let mut placed: VertexSet = VertexSet::new();
        for &v in &self.base {
            if v >= n {
                return Err(DecompositionError::InvalidTrace(format!(
                    "base vertex {} out of range",
                    v
                )));
            }
            if !placed.insert(v) {
                return Err(DecompositionError::InvalidTrace(format!(
                    "base vertex {} repeated",
                    v
                )));
            }
        }
        let mut adj: Vec<VertexSet> = vec![VertexSet::new(); n];
        for &a in &self.base {
            for &b in &self.base {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        for (idx, step) in self.steps.iter().enumerate() {
            if step.v >= n {
                return Err(DecompositionError::InvalidTrace(format!(
                    "step {} vertex {} out of range",
                    idx, step.v
                )));
            }
            if placed.contains(&step.v) {
                return Err(DecompositionError::InvalidTrace(format!(
                    "step {} vertex {} already placed",
                    idx, step.v
                )));
            }
            let clique: VertexSet = step.clique.iter().copied().collect();
            if clique.len() != k || step.clique.len() != k {
                return Err(DecompositionError::InvalidTrace(format!(
                    "step {} attachment has {} distinct vertices, expected {}",
                    idx,
                    clique.len(),
                    k
                )));
            }
            for &c in &clique {
                if !placed.contains(&c) {
                    return Err(DecompositionError::InvalidTrace(format!(
                        "step {} attaches to unplaced vertex {}",
                        idx, c
                    )));
                }
            }
            let cv: Vec<Vertex> = clique.iter().copied().collect();
            for i in 0..cv.len() {
                for j in i + 1..cv.len() {
                    if !adj[cv[i]].contains(&cv[j]) {
                        return Err(DecompositionError::InvalidTrace(format!(
                            "step {} attachment set is not a clique: {} and {} not adjacent",
                            idx, cv[i], cv[j]
                        )));
                    }
                }
            }
            placed.insert(step.v);
            for &c in &clique {
                adj[step.v].insert(c);
                adj[c].insert(step.v);
            }
        }
        if placed.len() != n {
            return Err(DecompositionError::InvalidTrace(
                "trace does not cover a dense vertex range".into(),
            ));
        }
        Ok(())
    }

    /// No attachment k-clique is used twice.
    pub fn is_simple(&self) -> bool {
        let mut used: BTreeSet<Vec<Vertex>> = BTreeSet::new();
        for step in &self.steps {
            let mut c = step.clique.clone();
            c.sort_unstable();
            if !used.insert(c) {
                return false;
            }
        }
        true
    }

    /// The traced k-tree.
    pub fn graph(&self) -> Result<Graph, DecompositionError> {
        self.validate()?;
        let n = self.vertex_count();
        let mut edges = BTreeSet::new();
        for &a in &self.base {
            for &b in &self.base {
                if a < b {
                    edges.insert((a, b));
                }
            }
        }
        for step in &self.steps {
            for &c in &step.clique {
                edges.insert((step.v.min(c), step.v.max(c)));
            }
        }
        Graph::new(n, edges).map_err(|e| DecompositionError::InvalidTrace(e.to_string()))
    }

    /// The natural decomposition: the base bag plus one bag `clique + v` per
    /// step, each attached below the first node covering its clique.
    pub fn decomposition(&self) -> Result<TreeDecomposition, DecompositionError> {
        self.validate()?;
        let mut bags: Vec<VertexSet> = vec![self.base.iter().copied().collect()];
        let mut tree_edges = BTreeSet::new();
        for step in &self.steps {
            let clique: VertexSet = step.clique.iter().copied().collect();
            let parent = (0..bags.len())
                .find(|&i| clique.is_subset(&bags[i]))
                .ok_or_else(|| {
                    DecompositionError::InvalidTrace(format!(
                        "attachment clique of vertex {} is in no bag",
                        step.v
                    ))
                })?;
            let mut bag = clique;
            bag.insert(step.v);
            let id = bags.len();
            bags.push(bag);
            tree_edges.insert((parent.min(id), parent.max(id)));
        }
        Ok(TreeDecomposition {
            bags,
            tree_edges,
            root: Some(0),
        })
    }
}

/// Reads a normal k-simple k-smooth decomposition as a simple k-tree: the
/// root bag is the base clique and every other node contributes its one new
/// vertex. Returns the completed supergraph and its trace.
pub fn decomposition_to_simple_ktree(
    g: &Graph,
    td: &TreeDecomposition,
    k: usize,
) -> Result<(Graph, ConstructionTrace), DecompositionError> {
    let report = verify_decomposition(g, td, k);
    if !(report.is_valid && report.is_normal && report.is_k_simple && report.is_k_smooth) {
        return Err(DecompositionError::PreconditionViolated(format!(
            "decomposition must be valid, normal, k-simple and k-smooth: {:?}",
            report.violations
        )));
    }
    let root = match td.root {
        Some(r) if r < td.bags.len() => r,
        _ => 0,
    };
    let rooted = root_at(td, root).ok_or_else(|| {
        DecompositionError::PreconditionViolated("tree edges do not form a tree".into())
    })?;
    let base: Vec<Vertex> = td.bags[root].iter().copied().collect();
    let mut steps = Vec::new();
    for &t in &rooted.bfs {
        if t == root {
            continue;
        }
        let p = rooted.parent[t].unwrap();
        let fresh: Vec<Vertex> = td.bags[t].difference(&td.bags[p]).copied().collect();
        if fresh.len() != 1 {
            return Err(DecompositionError::PreconditionViolated(format!(
                "bag {} introduces {} vertices, expected 1",
                t,
                fresh.len()
            )));
        }
        let clique: Vec<Vertex> = td.bags[t].intersection(&td.bags[p]).copied().collect();
        steps.push(TraceStep {
            v: fresh[0],
            clique,
        });
    }
    let trace = ConstructionTrace { k, base, steps };
    trace.validate()?;
    if !trace.is_simple() {
        return Err(DecompositionError::PreconditionViolated(
            "derived trace reuses an attachment clique".into(),
        ));
    }
    let completed = trace.graph()?;
    for (u, v) in g.edges() {
        if !completed.has_edge(u, v) {
            return Err(DecompositionError::PreconditionViolated(format!(
                "edge [{}, {}] missing from completion",
                u, v
            )));
        }
    }
    Ok((completed, trace))
}

/// Builds the decomposition of a validated simple k-tree trace.
pub fn simple_ktree_to_decomposition(
    trace: &ConstructionTrace,
) -> Result<TreeDecomposition, DecompositionError> {
    trace.validate()?;
    if !trace.is_simple() {
        return Err(DecompositionError::InvalidTrace(
            "trace reuses an attachment clique".into(),
        ));
    }
    trace.decomposition()
}

/// Greedy recognizer for exact k-trees: repeatedly strip the lowest-id vertex
/// of degree k with a clique neighborhood, then check the remaining core is a
/// (k+1)-clique. Returns the reversed construction order.
pub fn recognize_ktree(g: &Graph, k: usize) -> Option<ConstructionTrace> {
    let n = g.vertex_count();
    if k == 0 || n < k + 1 {
        return None;
    }
    let mut alive: VertexSet = (0..n).collect();
    let mut adj: Vec<VertexSet> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut removed: Vec<(Vertex, Vec<Vertex>)> = Vec::new();
    while alive.len() > k + 1 {
        let mut pick = None;
        'outer: for &v in &alive {
            if adj[v].len() != k {
                continue;
            }
            let nb: Vec<Vertex> = adj[v].iter().copied().collect();
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if !adj[nb[i]].contains(&nb[j]) {
                        continue 'outer;
                    }
                }
            }
            pick = Some((v, nb));
            break;
        }
        let (v, nb) = pick?;
        alive.remove(&v);
        for &u in &nb {
            adj[u].remove(&v);
        }
        adj[v].clear();
        removed.push((v, nb));
    }
    let core: Vec<Vertex> = alive.iter().copied().collect();
    for i in 0..core.len() {
        for j in i + 1..core.len() {
            if !adj[core[i]].contains(&core[j]) {
                return None;
            }
        }
    }
    let steps: Vec<TraceStep> = removed
        .into_iter()
        .rev()
        .map(|(v, clique)| TraceStep { v, clique })
        .collect();
    let trace = ConstructionTrace {
        k,
        base: core,
        steps,
    };
    trace.validate().ok()?;
    Some(trace)
}

/// Greedy recognizer for simple k-trees; the recovered trace must also avoid
/// reusing attachment cliques. Greedy elimination by lowest id is used, so a
/// rejection of a non-k-tree is always sound.
pub fn recognize_simple_ktree(g: &Graph, k: usize) -> Option<ConstructionTrace> {
    let trace = recognize_ktree(g, k)?;
    if !trace.is_simple() {
        return None;
    }
    Some(trace)
}

/// Completes `g` to a k-tree guided by a width-k decomposition: bags are
/// contracted, padded to size k+1 and smoothed, then turned into cliques.
pub fn ktree_completion(
    g: &Graph,
    td: &TreeDecomposition,
    k: usize,
) -> Result<(Graph, ConstructionTrace), DecompositionError> {
    let n = g.vertex_count();
    if n < k + 1 {
        return Err(DecompositionError::TooSmall);
    }
    let report = verify_decomposition(g, td, k);
    if report.width > k as i64 {
        return Err(DecompositionError::WidthExceeded {
            width: report.width,
            bound: k,
        });
    }
    if !report.is_valid {
        return Err(DecompositionError::PreconditionViolated(format!(
            "decomposition invalid: {:?}",
            report.violations
        )));
    }

    let mut work = td.clone();
    work.root = Some(0);
    let iter_limit = 8 * (k + 2) * (n + 2) * (n + 2) + 64;
    let mut iterations = 0;

    // Contract subsumed bags and pad every bag to exactly k+1 vertices,
    // always borrowing from an adjacent bag to preserve connectivity.
    loop {
        iterations += 1;
        if iterations > iter_limit {
            return Err(DecompositionError::NormalizationStuck);
        }
        if work.bags.len() > 1 {
            if let Some((x, y)) = find_subsumed_edge(&work) {
                contract_node(&mut work, x, y);
                continue;
            }
        }
        let small = (0..work.bags.len()).find(|&i| work.bags[i].len() < k + 1);
        let x = match small {
            Some(x) => x,
            None => break,
        };
        if work.bags.len() == 1 {
            return Err(DecompositionError::PreconditionViolated(
                "single-bag decomposition smaller than k+1 cannot cover the graph".into(),
            ));
        }
        let adj = work.node_adjacency();
        let mut grown = false;
        for &y in &adj[x] {
            if let Some(&v) = work.bags[y].difference(&work.bags[x]).next() {
                work.bags[x].insert(v);
                grown = true;
                break;
            }
        }
        if !grown {
            return Err(DecompositionError::NormalizationStuck);
        }
    }

    // Smooth every tree edge so adjacent bags differ in exactly one vertex.
    let edges: Vec<(usize, usize)> = work.tree_edges.iter().copied().collect();
    for (x, y) in edges {
        let inter: VertexSet = work.bags[x].intersection(&work.bags[y]).copied().collect();
        let d = k + 1 - inter.len();
        if d <= 1 {
            continue;
        }
        let out_x: Vec<Vertex> = work.bags[x].difference(&work.bags[y]).copied().collect();
        let in_y: Vec<Vertex> = work.bags[y].difference(&work.bags[x]).copied().collect();
        work.tree_edges.remove(&(x.min(y), x.max(y)));
        let mut prev = x;
        for i in 1..d {
            let mut bag = inter.clone();
            for &u in &out_x[i..] {
                bag.insert(u);
            }
            for &v in &in_y[..i] {
                bag.insert(v);
            }
            let id = work.bags.len();
            work.bags.push(bag);
            work.tree_edges.insert((prev.min(id), prev.max(id)));
            prev = id;
        }
        work.tree_edges.insert((prev.min(y), prev.max(y)));
    }

    // Read off the construction order.
    let root = work.root.unwrap_or(0);
    let rooted = root_at(&work, root).ok_or(DecompositionError::NormalizationStuck)?;
    let base: Vec<Vertex> = work.bags[root].iter().copied().collect();
    let mut steps = Vec::new();
    for &t in &rooted.bfs {
        if t == root {
            continue;
        }
        let p = rooted.parent[t].unwrap();
        let fresh: Vec<Vertex> = work.bags[t].difference(&work.bags[p]).copied().collect();
        if fresh.len() != 1 {
            return Err(DecompositionError::NormalizationStuck);
        }
        steps.push(TraceStep {
            v: fresh[0],
            clique: work.bags[t].intersection(&work.bags[p]).copied().collect(),
        });
    }
    let trace = ConstructionTrace { k, base, steps };
    trace.validate()?;
    let completed = trace.graph()?;
    for (u, v) in g.edges() {
        if !completed.has_edge(u, v) {
            return Err(DecompositionError::PreconditionViolated(format!(
                "edge [{}, {}] missing from completion",
                u, v
            )));
        }
    }
    Ok((completed, trace))
}

/// Proper (k+1)-coloring of a k-tree trace in which every (k+1)-clique sees
/// all colors: base vertices get colors `0..=k` in sorted order and each new
/// vertex takes the one color missing from its attachment clique.
pub fn rainbow_color_ktree(trace: &ConstructionTrace) -> Result<Vec<usize>, DecompositionError> {
    trace.validate()?;
    let n = trace.vertex_count();
    let mut colors = vec![usize::MAX; n];
    for (i, &v) in trace.base.iter().enumerate() {
        colors[v] = i;
    }
    for step in &trace.steps {
        let used: BTreeSet<usize> = step.clique.iter().map(|&c| colors[c]).collect();
        let missing: Vec<usize> = (0..=trace.k).filter(|c| !used.contains(c)).collect();
        if missing.len() != 1 {
            return Err(DecompositionError::InvalidTrace(format!(
                "attachment clique of vertex {} does not see exactly k colors",
                step.v
            )));
        }
        colors[step.v] = missing[0];
    }
    Ok(colors)
}
