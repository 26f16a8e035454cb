#![allow(dead_code)]

use std::collections::HashMap;

use entromag::flow::fixtures::{random_flow, Bundle};
use entromag::flow::FlowGraph;
use entromag::graph::{Digraph, Edge};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::Rng;

pub fn plastic() -> Digraph {
    Digraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 0)])
}

/// `ln` of the real root of `x^3 - x - 1`, by bisection.
pub fn plastic_h() -> f64 {
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid * mid - mid - 1.0 > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo.ln()
}

/// Digraph on `1..=max_n` vertices from an adjacency bit pattern.
pub fn arb_digraph(max_n: usize, loops: bool) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let edges = (0..n * n)
                .filter(|&i| bits[i] && (loops || i / n != i % n))
                .map(|i| (i / n, i % n));
            Digraph::from_edges(n, edges)
        })
    })
}

/// `A^len` with exact entries.
pub fn adjacency_power(d: &Digraph, len: usize) -> Vec<Vec<BigUint>> {
    let n = d.vertex_count();
    let mut p: Vec<Vec<BigUint>> = (0..n)
        .map(|i| (0..n).map(|j| BigUint::from((i == j) as u8)).collect())
        .collect();
    for _ in 0..len {
        let mut next = vec![vec![BigUint::ZERO; n]; n];
        for i in 0..n {
            for (k, pik) in p[i].iter().enumerate() {
                for &j in d.successors(k) {
                    next[i][j] += pik;
                }
            }
        }
        p = next;
    }
    p
}

/// Loopless digraph with each ordered pair present with probability `p`.
pub fn random_loopless(rng: &mut impl Rng, n: usize, p: f64) -> Digraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Digraph::from_edges(n, edges)
}

/// Random polytree: vertex `i > 0` attaches to a uniformly chosen earlier
/// vertex with a random orientation.
pub fn random_polytree(rng: &mut impl Rng, n: usize) -> Digraph {
    let edges: Vec<Edge> = (1..n)
        .map(|i| {
            let j = rng.random_range(0..i);
            if rng.random_bool(0.5) {
                (i, j)
            } else {
                (j, i)
            }
        })
        .collect();
    Digraph::from_edges(n, edges)
}

/// Random flow graph with at most `max_n` vertices.
pub fn small_flow(rng: &mut impl Rng, max_n: usize) -> FlowGraph {
    loop {
        let f = random_flow(rng, 2);
        if f.graph().vertex_count() <= max_n {
            return f;
        }
    }
}

/// Brute-force walk count by depth-first enumeration.
pub fn dfs_walks(d: &Digraph, v: usize, len: usize) -> u64 {
    if len == 0 {
        return 1;
    }
    d.successors(v)
        .iter()
        .map(|&w| dfs_walks(d, w, len - 1))
        .sum()
}

fn neg(x: f64) -> f64 {
    -x
}

/// Expected principal solutions of a bundle, keyed by edge: `w_hat` is the
/// negated running maximum of block entropies from the fork, `v_hat` the
/// negated running maximum towards the join; every edge without a nonempty
/// hom-object in that direction gets `+inf`.
pub fn bundle_oracle(b: &Bundle) -> (HashMap<Edge, f64>, HashMap<Edge, f64>) {
    let inf = f64::INFINITY;
    let mut w = HashMap::new();
    let mut v = HashMap::new();
    for e in b.flow.edges() {
        w.insert(e, inf);
        v.insert(e, inf);
    }
    let mut h_all = f64::NEG_INFINITY;
    for (row, chain) in b.backbone.iter().zip(&b.blocks) {
        let h: Vec<f64> = chain.iter().map(|k| k.entropy()).collect();
        for (j, &e) in row.iter().enumerate() {
            if j > 0 {
                let m = h[..j].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                w.insert(e, neg(m));
            }
            if j < chain.len() {
                let m = h[j..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
                v.insert(e, neg(m));
            }
        }
        h_all = h.iter().copied().fold(h_all, f64::max);
    }
    w.insert(b.exit(), neg(h_all));
    v.insert(b.entry(), neg(h_all));
    (v, w)
}

/// Index `j*` (1-based block index) of the first maximal-entropy block.
pub fn argmax_block(hs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &h) in hs.iter().enumerate() {
        if h > hs[best] {
            best = i;
        }
    }
    best + 1
}
