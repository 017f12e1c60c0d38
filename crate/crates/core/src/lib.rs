//! Construction, verification and stress-testing of embeddings of graphs of
//! bounded simple treewidth into strong and directed products of sparse
//! digraphs.
//!
//! The crate is organised around small immutable value types (graphs,
//! digraphs, tree decompositions, construction traces, embeddings) plus the
//! algorithms that connect them:
//!
//! * [`graph`]: undirected graphs and digraphs with the tournament helpers.
//! * [`decomposition`]: tree decompositions, k-tree construction traces and
//!   the smoothing/normalization pipeline.
//! * [`products`]: strong and directed products, embedding verification and
//!   per-clique diagnostics.
//! * [`embedders`]: constructive embedders for outerplanar graphs, simple
//!   k-tree traces, and k-tree traces with unbounded in-degree hosts.
//! * [`instances`]: seeded generators for extremal and random instances.
//! * [`oracle`]: brute-force references (exact treewidth, exact simple
//!   treewidth, clique number, exhaustive embedding search).

pub mod decomposition;
pub mod dot;
pub mod embedders;
pub mod graph;
pub mod instances;
pub mod oracle;
pub mod products;
