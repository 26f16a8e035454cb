//! Seeded random digraphs.
//!
//! All randomness comes from ChaCha8, a counter-based generator: a 64-bit
//! seed selects the key and a separate 64-bit stream id selects an
//! independent keystream. Draws are consumed in a fixed order, so results are
//! pure functions of `(inputs, seed, stream)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Digraph;

/// Generator for `(seed, stream)`. Distinct pairs give independent streams.
pub fn seeded_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// G(n, q) digraph: each ordered pair `(u, v)` with `u != v` is an edge
/// independently with probability `q`. Pairs are visited in lexicographic
/// order. No loops.
pub fn erdos_renyi(n: usize, q: f64, seed: u64) -> Digraph {
    erdos_renyi_with(n, q, &mut seeded_stream(seed, 0))
}

pub fn erdos_renyi_with(n: usize, q: f64, rng: &mut impl Rng) -> Digraph {
    assert!(
        (0.0..=1.0).contains(&q),
        "edge probability {q} outside [0, 1]"
    );
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random::<f64>() < q {
                edges.push((u, v));
            }
        }
    }
    Digraph::from_edges(n, edges)
}

/// Keeps each edge independently with probability `1 - p_remove`. The vertex
/// set and labels are unchanged, so isolated vertices may appear.
pub fn bernoulli_edge_subsample(d: &Digraph, p_remove: f64, seed: u64) -> Digraph {
    subsample_with(d, p_remove, &mut seeded_stream(seed, 0))
}

pub fn subsample_with(d: &Digraph, p_remove: f64, rng: &mut impl Rng) -> Digraph {
    assert!(
        (0.0..=1.0).contains(&p_remove),
        "removal probability {p_remove} outside [0, 1]"
    );
    // One draw per edge even at the extremes keeps stream positions aligned.
    d.filter_edges(|_| rng.random::<f64>() >= p_remove)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        assert_eq!(erdos_renyi(6, 0.0, 1).edge_count(), 0);
        let full = erdos_renyi(6, 1.0, 1);
        assert_eq!(full.edge_count(), 30);
        assert!(!full.has_loops());
        assert_eq!(bernoulli_edge_subsample(&full, 0.0, 3), full);
        let empty = bernoulli_edge_subsample(&full, 1.0, 3);
        assert_eq!(empty.edge_count(), 0);
        assert_eq!(empty.vertex_count(), 6);
    }

    #[test]
    fn determinism() {
        let a = erdos_renyi(40, 0.1, 77);
        assert_eq!(a, erdos_renyi(40, 0.1, 77));
        assert_ne!(a, erdos_renyi(40, 0.1, 78));
        assert_eq!(
            bernoulli_edge_subsample(&a, 0.5, 9),
            bernoulli_edge_subsample(&a, 0.5, 9)
        );
    }

    #[test]
    fn streams_are_independent() {
        let a = erdos_renyi_with(30, 0.2, &mut seeded_stream(5, 1));
        let b = erdos_renyi_with(30, 0.2, &mut seeded_stream(5, 2));
        assert_ne!(a, b);
    }
}
