//! Graphviz DOT rendering for graphs, digraphs and embeddings.

use crate::graph::{Digraph, Graph, Vertex};

/// Undirected graph in DOT form, one edge per line.
pub fn graph_to_dot(g: &Graph, name: &str) -> String {
    let mut out = format!("graph {} {{\n", name);
    for v in 0..g.vertex_count() {
        out.push_str(&format!("  {};\n", v));
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("  {} -- {};\n", u, v));
    }
    out.push_str("}\n");
    out
}

/// Digraph in DOT form; arcs are rendered as directed edges.
pub fn digraph_to_dot(d: &Digraph, name: &str) -> String {
    let mut out = format!("digraph {} {{\n", name);
    for v in 0..d.vertex_count() {
        out.push_str(&format!("  {};\n", v));
    }
    for (u, v) in d.arcs() {
        out.push_str(&format!("  {} -> {};\n", u, v));
    }
    out.push_str("}\n");
    out
}

/// Product-shaped drawing: vertices are labelled with their coordinate pair,
/// and edges listed in `diagonal` are colored to stand out.
pub fn product_to_dot(
    g: &Graph,
    coords: &[(Vertex, Vertex)],
    diagonal: &[(Vertex, Vertex)],
    name: &str,
) -> String {
    assert_eq!(coords.len(), g.vertex_count());
    let mut out = format!("graph {} {{\n", name);
    for (v, (a, b)) in coords.iter().enumerate() {
        out.push_str(&format!("  {} [label=\"({},{})\"];\n", v, a, b));
    }
    let diag: std::collections::BTreeSet<(Vertex, Vertex)> = diagonal
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    for (u, v) in g.edges() {
        if diag.contains(&(u, v)) {
            out.push_str(&format!("  {} -- {} [color=red];\n", u, v));
        } else {
            out.push_str(&format!("  {} -- {};\n", u, v));
        }
    }
    out.push_str("}\n");
    out
}
