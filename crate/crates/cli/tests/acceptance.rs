//! One test per acceptance criterion. Each prints a single
//! `ACCEPTANCE <n> (<label>): PASS|FAIL` line (visible with `--nocapture`).

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use psk_core::decomposition::{
    decomposition_to_simple_ktree, normalize_to_smooth_simple, simple_ktree_to_decomposition,
    verify_decomposition, ConstructionTrace,
};
use psk_core::embedders::{embed_outerplanar, embed_simple_treewidth, embed_unbounded_indegree};
use psk_core::graph::{Graph, VertexSet};
use psk_core::instances::{gen_kbar3, gen_max_outerplanar, gen_random_simple_ktree};
use psk_core::oracle::{
    canonical_digraphs, exact_simple_treewidth, exact_simple_treewidth_witness, exact_treewidth,
    exhaustive_embedding_search, SearchBudget, SearchOutcome,
};
use psk_core::products::{
    attachment_threshold, clique_diagnostics, directed_product, pair_to_index, strong_product,
    verify_embedding,
};

fn criterion<F: FnOnce() + UnwindSafe>(no: usize, label: &str, body: F) {
    match catch_unwind(body) {
        Ok(()) => println!("ACCEPTANCE {} ({}): PASS", no, label),
        Err(cause) => {
            println!("ACCEPTANCE {} ({}): FAIL", no, label);
            resume_unwind(cause);
        }
    }
}

#[test]
fn acceptance_1_outerplanar_embeddings() {
    criterion(1, "outerplanar embeddings into tree products", || {
        for i in 0..100usize {
            let n = 3 + (i * 197) / 99;
            let g = gen_max_outerplanar(n, 1300 + i as u64).unwrap();
            let started = Instant::now();
            let e = embed_outerplanar(&g).unwrap();
            let report = verify_embedding(&g, &e);
            assert!(report.is_valid, "n={} i={}: {:?}", n, i, report);
            for host in [&e.host1, &e.host2] {
                let und = host.underlying();
                assert!(und.is_connected(), "n={} i={}: host not connected", n, i);
                assert_eq!(und.edge_count(), und.vertex_count() - 1, "host has a cycle");
                assert!(host.max_indegree() <= 1, "indegree above 1");
            }
            assert!(
                started.elapsed() < Duration::from_secs(1),
                "instance n={} took {:?}",
                n,
                started.elapsed()
            );
        }
    });
}

/// The shared seeded corpus: 25 traces per width, vertex counts spread up
/// to 200.
fn trace_corpus() -> Vec<ConstructionTrace> {
    let mut out = Vec::new();
    for k in 2..=5usize {
        for i in 0..25usize {
            let lo = k + 2;
            let n = lo + ((200 - lo) * i) / 24;
            out.push(gen_random_simple_ktree(k, n, (1000 * k + i) as u64).unwrap());
        }
    }
    out
}

#[test]
fn acceptance_2_simple_ktree_embeddings() {
    criterion(2, "simple k-tree embeddings with tight indegree", || {
        for trace in trace_corpus() {
            let k = trace.k;
            let g = trace.graph().unwrap();
            let n = g.vertex_count();
            let started = Instant::now();
            let e = embed_simple_treewidth(&trace).unwrap();
            let report = verify_embedding(&g, &e);
            assert!(report.is_valid, "k={} n={}: {:?}", k, n, report);
            let bound = k - 1;
            assert!(
                e.host1.max_indegree() <= bound,
                "k={} n={}: host1 indegree",
                k,
                n
            );
            assert!(
                e.host2.max_indegree() <= bound,
                "k={} n={}: host2 indegree",
                k,
                n
            );
            for (host, witness) in [(&e.host1, &e.witness1), (&e.host2, &e.witness2)] {
                let td = witness.as_ref().expect("embedder attaches host witnesses");
                assert!(
                    td.width() <= bound as i64,
                    "k={} n={}: witness too wide",
                    k,
                    n
                );
                let rep = verify_decomposition(&host.underlying(), td, bound);
                assert!(rep.is_valid, "k={} n={}: {:?}", k, n, rep.violations);
            }
            if n <= 60 {
                for c in g.cliques_of_size(k) {
                    let set: VertexSet = c.iter().copied().collect();
                    let p1 = e.projection1(&set).unwrap();
                    let p2 = e.projection2(&set).unwrap();
                    assert!(
                        e.host1.is_transitive_tournament(&p1).unwrap(),
                        "k={} n={} clique {:?}: projection 1 not a transitive tournament",
                        k,
                        n,
                        c
                    );
                    assert!(
                        e.host2.is_transitive_tournament(&p2).unwrap(),
                        "k={} n={} clique {:?}: projection 2 not a transitive tournament",
                        k,
                        n,
                        c
                    );
                }
            }
            assert!(
                started.elapsed() < Duration::from_secs(5),
                "instance k={} n={} took {:?}",
                k,
                n,
                started.elapsed()
            );
        }
    });
}

#[test]
fn acceptance_3_product_indegree_bound() {
    criterion(3, "product indegree arithmetic", || {
        let ds: Vec<_> = canonical_digraphs(4)
            .into_iter()
            .filter(|d| d.max_indegree() <= 2)
            .collect();
        assert!(ds.len() > 100, "canonical enumeration looks truncated");
        for d1 in &ds {
            let s = d1.max_indegree();
            for d2 in &ds {
                let t = d2.max_indegree();
                let p = directed_product(d1, d2);
                assert!(
                    p.max_indegree() <= s * t + s + t,
                    "indegree bound violated for factors with s={} t={}",
                    s,
                    t
                );
            }
        }
    });
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn fill(ids: &mut Vec<usize>, from: usize, out: &mut Vec<Vec<usize>>) {
        if from == ids.len() {
            out.push(ids.clone());
            return;
        }
        for i in from..ids.len() {
            ids.swap(from, i);
            fill(ids, from + 1, out);
            ids.swap(from, i);
        }
    }
    let mut ids: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    fill(&mut ids, 0, &mut out);
    out
}

/// Bit position of edge {i, j} (i < j) in the packed upper-triangular mask.
fn eidx(i: usize, j: usize, n: usize) -> usize {
    (i * (2 * n - i - 1)) / 2 + (j - i - 1)
}

fn relabel_mask(n: usize, mask: u32, perm: &[usize]) -> u32 {
    let mut out = 0u32;
    for i in 0..n {
        for j in i + 1..n {
            if mask & (1 << eidx(i, j, n)) != 0 {
                let (a, b) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
                out |= 1 << eidx(a, b, n);
            }
        }
    }
    out
}

fn canonical_mask(n: usize, mask: u32, perms: &[Vec<usize>]) -> u32 {
    perms
        .iter()
        .map(|p| relabel_mask(n, mask, p))
        .min()
        .unwrap()
}

fn mask_to_graph(n: usize, mask: u32) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if mask & (1 << eidx(i, j, n)) != 0 {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Connected graphs on n vertices up to isomorphism, as canonical edge
/// masks. Every connected graph arises from a connected graph one vertex
/// smaller by adding a non-cut vertex, so extension is exhaustive.
fn connected_graph_masks(n: usize) -> Vec<u32> {
    if n == 1 {
        return vec![0];
    }
    let perms = all_permutations(n);
    let mut seen = BTreeSet::new();
    for pm in connected_graph_masks(n - 1) {
        let mut base = 0u32;
        for i in 0..n - 1 {
            for j in i + 1..n - 1 {
                if pm & (1 << eidx(i, j, n - 1)) != 0 {
                    base |= 1 << eidx(i, j, n);
                }
            }
        }
        for nb in 1u32..(1 << (n - 1)) {
            let mut mask = base;
            for i in 0..n - 1 {
                if nb & (1 << i) != 0 {
                    mask |= 1 << eidx(i, n - 1, n);
                }
            }
            seen.insert(canonical_mask(n, mask, &perms));
        }
    }
    seen.into_iter().collect()
}

/// All graphs on n vertices up to isomorphism (n small enough to scan every
/// labeled graph).
fn all_graph_masks(n: usize) -> Vec<u32> {
    let perms = all_permutations(n);
    let bits = n * (n - 1) / 2;
    let mut seen = BTreeSet::new();
    for mask in 0u32..(1 << bits) {
        seen.insert(canonical_mask(n, mask, &perms));
    }
    seen.into_iter().collect()
}

/// Whether g has a minor with `roles` branch sets and the given required
/// adjacencies (pairs (a, b) with a < b). `orbit_prev[r]` points at an
/// interchangeable earlier role, letting the search order those branch sets.
fn has_minor(
    g: &Graph,
    roles: usize,
    required: &[(usize, usize)],
    orbit_prev: &[Option<usize>],
) -> bool {
    let n = g.vertex_count();
    if n < roles {
        return false;
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let connected = |mask: u32| -> bool {
        let mut seen = 1u32 << mask.trailing_zeros();
        loop {
            let mut grown = seen;
            let mut probe = seen;
            while probe != 0 {
                let v = probe.trailing_zeros() as usize;
                probe &= probe - 1;
                grown |= adj[v] & mask;
            }
            if grown == seen {
                return seen == mask;
            }
            seen = grown;
        }
    };
    let full = (1u32 << n) - 1;
    let branch_sets: Vec<u32> = (1..=full).filter(|&m| connected(m)).collect();
    let reach = |mask: u32| -> u32 {
        let mut out = 0u32;
        let mut probe = mask;
        while probe != 0 {
            let v = probe.trailing_zeros() as usize;
            probe &= probe - 1;
            out |= adj[v];
        }
        out
    };

    fn extend(
        chosen: &mut Vec<(u32, u32)>,
        used: u32,
        roles: usize,
        required: &[(usize, usize)],
        orbit_prev: &[Option<usize>],
        branch_sets: &[u32],
        reach: &dyn Fn(u32) -> u32,
    ) -> bool {
        let r = chosen.len();
        if r == roles {
            return true;
        }
        'cand: for &m in branch_sets {
            if m & used != 0 {
                continue;
            }
            if let Some(prev) = orbit_prev[r] {
                if chosen[prev].0 >= m {
                    continue;
                }
            }
            for &(a, b) in required {
                if b == r && chosen[a].1 & m == 0 {
                    continue 'cand;
                }
            }
            chosen.push((m, reach(m)));
            if extend(
                chosen,
                used | m,
                roles,
                required,
                orbit_prev,
                branch_sets,
                reach,
            ) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let mut chosen = Vec::new();
    extend(
        &mut chosen,
        0,
        roles,
        required,
        orbit_prev,
        &branch_sets,
        &reach,
    )
}

/// Outerplanarity by excluded minors: no K4 and no K_{2,3} minor.
fn outerplanar_by_minors(g: &Graph) -> bool {
    let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let k4_orbits = [None, Some(0), Some(1), Some(2)];
    let k23 = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)];
    let k23_orbits = [None, Some(0), None, Some(2), Some(3)];
    !has_minor(g, 4, &k4, &k4_orbits) && !has_minor(g, 5, &k23, &k23_orbits)
}

#[test]
fn acceptance_4_width_two_normalization() {
    criterion(4, "width-two normalization and outerplanarity", || {
        let expected_counts = [1usize, 1, 2, 6, 21, 112, 853];
        for n in 1..=7usize {
            let masks = connected_graph_masks(n);
            assert_eq!(
                masks.len(),
                expected_counts[n - 1],
                "connected graph count for n={}",
                n
            );
            for mask in masks {
                let g = mask_to_graph(n, mask);
                let stw = exact_simple_treewidth(&g).unwrap();
                let outer = outerplanar_by_minors(&g);
                assert_eq!(
                    stw <= 2,
                    outer,
                    "n={} mask={:#b}: width {} vs outerplanar {}",
                    n,
                    mask,
                    stw,
                    outer
                );
                if stw > 2 || n < 3 {
                    continue;
                }
                let (_, witness) = exact_simple_treewidth_witness(&g).unwrap();
                let mut td = witness.decomposition().unwrap();
                // Break normality with singleton leaves; validity and
                // 2-simplicity survive, so normalization must repair it.
                for v in [0, n - 1] {
                    let home = td.bags.iter().position(|b| b.contains(&v)).unwrap();
                    let id = td.bags.len();
                    td.bags.push(std::iter::once(v).collect());
                    td.tree_edges.insert((home, id));
                }
                let smooth = normalize_to_smooth_simple(&g, &td, 2).unwrap();
                let rep = verify_decomposition(&g, &smooth, 2);
                assert!(
                    rep.is_valid && rep.is_normal && rep.is_k_simple && rep.is_k_smooth,
                    "n={} mask={:#b}: {:?}",
                    n,
                    mask,
                    rep.violations
                );
                let (completed, trace) = decomposition_to_simple_ktree(&g, &smooth, 2).unwrap();
                let round = simple_ktree_to_decomposition(&trace).unwrap();
                let back = verify_decomposition(&completed, &round, 2);
                assert!(
                    back.is_valid && back.is_k_simple,
                    "n={} mask={:#b}: round trip lost simplicity: {:?}",
                    n,
                    mask,
                    back.violations
                );
            }
        }
    });
}

#[test]
fn acceptance_5_lower_bound_gadget() {
    criterion(5, "lower-bound gadget widths", || {
        for k in [1usize, 2] {
            let g = gen_kbar3(k);
            assert_eq!(
                exact_treewidth(&g).unwrap(),
                k as i64,
                "treewidth for k={}",
                k
            );
            assert_eq!(
                exact_simple_treewidth(&g).unwrap(),
                k + 1,
                "simple treewidth for k={}",
                k
            );
        }
    });
}

#[test]
fn acceptance_6_split_width_embeddings() {
    criterion(6, "split-width embeddings across all (p, q)", || {
        for k in [2usize, 3, 4] {
            for i in 0..5usize {
                let lo = k + 2;
                let n = lo + ((60 - lo) * i) / 4;
                let trace = gen_random_simple_ktree(k, n, (77 * k + i) as u64).unwrap();
                let g = trace.graph().unwrap();
                for p in 1..=k + 1 {
                    for q in 1..=k + 1 {
                        if p + q < k + 1 {
                            continue;
                        }
                        let e = embed_unbounded_indegree(&trace, p, q).unwrap();
                        let report = verify_embedding(&g, &e);
                        assert!(
                            report.is_valid,
                            "k={} n={} p={} q={}: {:?}",
                            k, n, p, q, report
                        );
                        let w1 = e.witness1.as_ref().expect("witness for host 1");
                        let w2 = e.witness2.as_ref().expect("witness for host 2");
                        assert!(w1.width() <= p as i64, "k={} p={} q={}: width1", k, p, q);
                        assert!(w2.width() <= q as i64, "k={} p={} q={}: width2", k, p, q);
                        assert!(verify_decomposition(&e.host1.underlying(), w1, p).is_valid);
                        assert!(verify_decomposition(&e.host2.underlying(), w2, q).is_valid);

                        let sp = strong_product(&e.host1.underlying(), &e.host2.underlying());
                        let n2 = e.host2.vertex_count();
                        for (u, v) in g.edges() {
                            let (a1, b1) = e.image(u).unwrap();
                            let (a2, b2) = e.image(v).unwrap();
                            assert!(
                                sp.has_edge(pair_to_index(a1, b1, n2), pair_to_index(a2, b2, n2)),
                                "k={} p={} q={}: edge [{}, {}] escapes the strong product",
                                k,
                                p,
                                q,
                                u,
                                v
                            );
                        }
                    }
                }
            }
        }
    });
}

#[test]
fn acceptance_7_crowded_clique_diagnostics() {
    criterion(
        7,
        "crowded cliques expose diagonal or magnetic vertices",
        || {
            let mut scanned = 0u64;
            for trace in trace_corpus() {
                let k = trace.k;
                let g = trace.graph().unwrap();
                let e = embed_simple_treewidth(&trace).unwrap();
                let s = e.host1.max_indegree();
                let t = e.host2.max_indegree();
                if s != k - 1 || t != k - 1 {
                    continue;
                }
                let threshold = attachment_threshold(s, t, k);
                for c in g.cliques_of_size(k) {
                    scanned += 1;
                    let set: VertexSet = c.iter().copied().collect();
                    let diag = clique_diagnostics(&g, &e, &set).unwrap();
                    if diag.attachment_count >= threshold {
                        assert!(
                        diag.attached.iter().any(|a| a.diagonal || a.magnetic1 || a.magnetic2),
                        "k={} clique {:?} has {} attachments but no diagonal or magnetic vertex",
                        k,
                        c,
                        diag.attachment_count
                    );
                    }
                }
            }
            assert!(
                scanned > 10_000,
                "scan covered too few cliques: {}",
                scanned
            );
        },
    );
}

struct NaiveHost {
    n: usize,
    arcs: BTreeSet<(usize, usize)>,
}

/// Every labeled digraph on 1..=max_n vertices passing the budget filters,
/// with eligibility recomputed from scratch: the orientation test scans for
/// anti-parallel pairs, indegrees are counted per arc head, and the
/// treewidth cap (at most 1 here) becomes an explicit forest check.
fn naive_hosts(
    max_n: usize,
    max_indegree: usize,
    max_tw: usize,
    oriented_only: bool,
) -> Vec<NaiveHost> {
    assert!(
        max_tw <= 1,
        "the reference enumerator only handles forest budgets"
    );
    let mut out = Vec::new();
    for n in 1..=max_n {
        let slots: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        'code: for code in 0u32..(1 << slots.len()) {
            let arcs: BTreeSet<(usize, usize)> = slots
                .iter()
                .enumerate()
                .filter(|&(b, _)| code & (1 << b) != 0)
                .map(|(_, &p)| p)
                .collect();
            if oriented_only && arcs.iter().any(|&(a, b)| arcs.contains(&(b, a))) {
                continue;
            }
            let mut indeg = vec![0usize; n];
            for &(_, head) in &arcs {
                indeg[head] += 1;
                if indeg[head] > max_indegree {
                    continue 'code;
                }
            }
            let und: BTreeSet<(usize, usize)> =
                arcs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            if max_tw == 0 && !und.is_empty() {
                continue;
            }
            let mut rep: Vec<usize> = (0..n).collect();
            fn find(rep: &mut Vec<usize>, v: usize) -> usize {
                if rep[v] != v {
                    rep[v] = find(rep, rep[v]);
                }
                rep[v]
            }
            for &(a, b) in &und {
                let (ra, rb) = (find(&mut rep, a), find(&mut rep, b));
                if ra == rb {
                    continue 'code;
                }
                rep[ra] = rb;
            }
            out.push(NaiveHost { n, arcs });
        }
    }
    out
}

/// Product adjacency of two placed coordinates, straight from the factor
/// arcs: shared row or column uses an arc of the other factor in either
/// direction, distinct rows and columns need a co-directed arc pair.
fn naive_adjacent(h1: &NaiveHost, h2: &NaiveHost, x: (usize, usize), y: (usize, usize)) -> bool {
    let ((a1, b1), (a2, b2)) = (x, y);
    if a1 == a2 && b1 == b2 {
        return false;
    }
    if a1 == a2 {
        return h2.arcs.contains(&(b1, b2)) || h2.arcs.contains(&(b2, b1));
    }
    if b1 == b2 {
        return h1.arcs.contains(&(a1, a2)) || h1.arcs.contains(&(a2, a1));
    }
    (h1.arcs.contains(&(a1, a2)) && h2.arcs.contains(&(b1, b2)))
        || (h1.arcs.contains(&(a2, a1)) && h2.arcs.contains(&(b2, b1)))
}

fn naive_pair_embeds(g: &Graph, h1: &NaiveHost, h2: &NaiveHost) -> bool {
    let n = g.vertex_count();
    let coords: Vec<(usize, usize)> = (0..h1.n)
        .flat_map(|a| (0..h2.n).map(move |b| (a, b)))
        .collect();
    if coords.len() < n {
        return false;
    }
    // Every injective map, built without adjacency pruning and checked whole.
    fn assign(
        g: &Graph,
        h1: &NaiveHost,
        h2: &NaiveHost,
        coords: &[(usize, usize)],
        map: &mut Vec<(usize, usize)>,
        used: &mut Vec<bool>,
    ) -> bool {
        if map.len() == g.vertex_count() {
            return g
                .edges()
                .all(|(u, v)| naive_adjacent(h1, h2, map[u], map[v]));
        }
        for (i, &c) in coords.iter().enumerate() {
            if used[i] {
                continue;
            }
            used[i] = true;
            map.push(c);
            if assign(g, h1, h2, coords, map, used) {
                return true;
            }
            map.pop();
            used[i] = false;
        }
        false
    }
    let mut map = Vec::new();
    let mut used = vec![false; coords.len()];
    assign(g, h1, h2, &coords, &mut map, &mut used)
}

fn naive_search_embeddable(g: &Graph, budget: &SearchBudget) -> bool {
    let hosts1 = naive_hosts(
        budget.max_host_size,
        budget.max_indegree1,
        budget.max_tw1,
        budget.oriented_only,
    );
    let hosts2 = naive_hosts(
        budget.max_host_size,
        budget.max_indegree2,
        budget.max_tw2,
        budget.oriented_only,
    );
    for h1 in &hosts1 {
        for h2 in &hosts2 {
            if naive_pair_embeds(g, h1, h2) {
                return true;
            }
        }
    }
    false
}

#[test]
fn acceptance_8_search_oracle_consistency() {
    criterion(8, "search oracle agrees with the naive enumerator", || {
        let mut guests = Vec::new();
        for n in 1..=5usize {
            for mask in all_graph_masks(n) {
                guests.push(mask_to_graph(n, mask));
            }
        }
        assert_eq!(guests.len(), 52, "graph count up to isomorphism");

        let budget = SearchBudget {
            max_host_size: 3,
            max_indegree1: 1,
            max_indegree2: 1,
            max_tw1: 1,
            max_tw2: 1,
            oriented_only: true,
        };
        for g in &guests {
            let outcome = exhaustive_embedding_search(g, &budget).unwrap();
            let naive = naive_search_embeddable(g, &budget);
            match &outcome {
                SearchOutcome::Embeddable { embedding } => {
                    assert!(naive, "naive enumerator misses an embedding: {:?}", g);
                    assert!(verify_embedding(g, embedding).is_valid, "bad certificate");
                }
                SearchOutcome::NonEmbeddable { .. } => {
                    assert!(!naive, "search misses an embedding found naively: {:?}", g);
                }
            }
        }

        let k4 = Graph::complete(4);
        let relaxed = SearchBudget {
            max_host_size: 2,
            max_indegree1: 1,
            max_indegree2: 1,
            max_tw1: 1,
            max_tw2: 1,
            oriented_only: false,
        };
        match exhaustive_embedding_search(&k4, &relaxed).unwrap() {
            SearchOutcome::Embeddable { embedding } => {
                assert!(verify_embedding(&k4, &embedding).is_valid);
            }
            other => panic!("complete graph on 2x2 coordinates must embed: {:?}", other),
        }
        let strict = SearchBudget {
            oriented_only: true,
            ..relaxed
        };
        assert!(
            matches!(
                exhaustive_embedding_search(&k4, &strict).unwrap(),
                SearchOutcome::NonEmbeddable { .. }
            ),
            "oriented hosts realize only one diagonal per block"
        );
        let edgeless_hosts = SearchBudget {
            max_host_size: 3,
            max_indegree1: 2,
            max_indegree2: 2,
            max_tw1: 0,
            max_tw2: 0,
            oriented_only: false,
        };
        assert!(matches!(
            exhaustive_embedding_search(&Graph::complete(2), &edgeless_hosts).unwrap(),
            SearchOutcome::NonEmbeddable { .. }
        ));
    });
}

fn run_psk(args: &[&str], input: &[u8]) -> Vec<u8> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_psk"))
        .args(args)
        .env_remove("PSK_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn psk");
    if let Err(e) = child.stdin.take().unwrap().write_all(input) {
        assert_eq!(
            e.kind(),
            std::io::ErrorKind::BrokenPipe,
            "write stdin: {}",
            e
        );
    }
    let out = child.wait_with_output().expect("wait for psk");
    assert!(
        out.status.success(),
        "psk {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

#[test]
fn acceptance_9_worker_count_determinism() {
    criterion(9, "worker count never changes output bytes", || {
        let corpus_runs = |jobs: &str| -> Vec<Vec<u8>> {
            let mut artifacts = Vec::new();
            let outer = run_psk(
                &[
                    "generate",
                    "--family",
                    "max-outerplanar",
                    "--n",
                    "150",
                    "--seed",
                    "21",
                    "--count",
                    "40",
                ],
                b"",
            );
            let embedded = run_psk(
                &["embed", "--method", "outerplanar", "--jobs", jobs],
                &outer,
            );
            artifacts.push(embedded.clone());
            artifacts.push(run_psk(&["verify", "--jobs", jobs], &embedded));

            let traces = run_psk(
                &[
                    "generate",
                    "--family",
                    "random-simple-ktree",
                    "--k",
                    "4",
                    "--n",
                    "120",
                    "--seed",
                    "8",
                    "--count",
                    "25",
                ],
                b"",
            );
            let embedded = run_psk(
                &["embed", "--method", "simple-stw", "--jobs", jobs],
                &traces,
            );
            artifacts.push(embedded.clone());
            artifacts.push(run_psk(&["verify", "--jobs", jobs], &embedded));

            let small = run_psk(
                &[
                    "generate",
                    "--family",
                    "max-outerplanar",
                    "--n",
                    "8",
                    "--seed",
                    "2",
                    "--count",
                    "8",
                ],
                b"",
            );
            artifacts.push(run_psk(&["oracle", "stw", "--jobs", jobs], &small));
            artifacts
        };
        let single = corpus_runs("1");
        let multi = corpus_runs("3");
        let repeat = corpus_runs("3");
        assert_eq!(single, multi, "outputs differ between 1 and 3 workers");
        assert_eq!(multi, repeat, "repeated run is not reproducible");
    });
}
