//! Seeded, reproducible generators for the graph families used by the
//! embedders and stress tests.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{ConstructionTrace, TraceStep};
use crate::graph::{Graph, Vertex};

pub const EXPLOSION_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("generation would produce {projected} vertices, over the cap {cap}")]
    Explosion { projected: usize, cap: usize },
}

/// Complete bipartite K_{k,3} with the k-side turned into a clique: the
/// smallest graph of treewidth k whose simple treewidth is k+1. Vertices
/// 0..k form the clique, k..k+3 the independent side.
pub fn gen_kbar3(k: usize) -> Graph {
    assert!(k >= 1, "the clique side needs at least one vertex");
    let mut edges = BTreeSet::new();
    for u in 0..k {
        for v in u + 1..k {
            edges.insert((u, v));
        }
        for b in k..k + 3 {
            edges.insert((u, b));
        }
    }
    Graph::new(k + 3, edges).expect("construction stays in range")
}

/// Uniformly random simple k-tree trace: each step attaches a fresh vertex
/// to a k-clique drawn uniformly from those not yet used.
pub fn gen_random_simple_ktree(
    k: usize,
    n: usize,
    seed: u64,
) -> Result<ConstructionTrace, InstanceError> {
    if k == 0 {
        return Err(InstanceError::ParameterRange("k must be at least 1".into()));
    }
    if n < k + 1 {
        return Err(InstanceError::ParameterRange(format!(
            "need at least {} vertices for a {}-tree, got {}",
            k + 1,
            k,
            n
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<Vertex> = (0..=k).collect();
    // Unused k-cliques of the graph built so far. Every step consumes one
    // and creates k fresh ones through the new vertex.
    let mut available: Vec<Vec<Vertex>> = Vec::new();
    for skip in 0..base.len() {
        let mut c = base.clone();
        c.remove(skip);
        available.push(c);
    }
    let mut steps = Vec::new();
    for v in k + 1..n {
        let pick = rng.gen_range(0..available.len());
        let clique = available.swap_remove(pick);
        for skip in 0..clique.len() {
            let mut c = clique.clone();
            c[skip] = v;
            c.sort_unstable();
            available.push(c);
        }
        steps.push(TraceStep { v, clique });
    }
    let trace = ConstructionTrace { k, base, steps };
    debug_assert!(trace.validate().is_ok() && trace.is_simple());
    Ok(trace)
}

/// Random maximal outerplanar graph: triangles pasted along free outer
/// edges, which is exactly a random simple 2-tree.
pub fn gen_max_outerplanar(n: usize, seed: u64) -> Result<Graph, InstanceError> {
    if n < 3 {
        return Err(InstanceError::ParameterRange(format!(
            "need at least 3 vertices, got {}",
            n
        )));
    }
    let trace = gen_random_simple_ktree(2, n, seed)?;
    Ok(trace.graph().expect("generated traces are valid"))
}

/// Repeatedly attaches `copies` fresh vertices to every k-clique of the
/// current graph, `rounds` times.
pub fn gen_attachment_closure(
    g0: &Graph,
    k: usize,
    copies: usize,
    rounds: usize,
) -> Result<Graph, InstanceError> {
    if k == 0 || copies == 0 || rounds == 0 {
        return Err(InstanceError::ParameterRange(
            "k, copies and rounds must all be at least 1".into(),
        ));
    }
    if g0.cliques_of_size(k).is_empty() {
        return Err(InstanceError::ParameterRange(format!(
            "seed graph has no {}-clique",
            k
        )));
    }
    let mut g = g0.clone();
    for _ in 0..rounds {
        let cliques = g.cliques_of_size(k);
        let projected = g
            .vertex_count()
            .saturating_add(cliques.len().saturating_mul(copies));
        if projected > EXPLOSION_CAP {
            return Err(InstanceError::Explosion {
                projected,
                cap: EXPLOSION_CAP,
            });
        }
        let mut n = g.vertex_count();
        let mut edges: BTreeSet<(Vertex, Vertex)> = g.edges().collect();
        for clique in cliques {
            for _ in 0..copies {
                for &c in &clique {
                    edges.insert((c, n));
                }
                n += 1;
            }
        }
        g = Graph::new(n, edges).expect("new vertices extend the range");
    }
    Ok(g)
}

/// Two-stage attachment construction over a treewidth-(k-1) base: two fresh
/// vertices per k-clique of the base, then (k-1)^2 + 1 fresh vertices per
/// (k-1)-clique of the intermediate graph.
pub fn gen_stw_lowerbound(k: usize, base: &Graph) -> Result<Graph, InstanceError> {
    if k < 3 {
        return Err(InstanceError::ParameterRange(format!(
            "construction needs k >= 3, got {}",
            k
        )));
    }
    if base.vertex_count() <= crate::oracle::TREEWIDTH_LIMIT {
        match crate::oracle::exact_treewidth(base) {
            Ok(tw) if tw == k as i64 - 1 => {}
            Ok(tw) => {
                return Err(InstanceError::ParameterRange(format!(
                    "base must have treewidth {}, has {}",
                    k - 1,
                    tw
                )))
            }
            Err(_) => {}
        }
    }
    let intermediate = gen_attachment_closure(base, k, 2, 1)?;
    gen_attachment_closure(&intermediate, k - 1, (k - 1) * (k - 1) + 1, 1)
}
