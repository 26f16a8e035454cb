//! Balls in the universal cover of a loopless digraph.
//!
//! A cover vertex is a walk `(v0, v1, ..., vl)` from the basepoint; its
//! parent drops the last step. The ball of radius `L` is the arborescence of
//! walks with at most `L` steps, so it is a polytree and its magnitude
//! function has the closed form `n - (n - 1) e^{-t}`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{is_acyclic, Digraph, VertexId};
use crate::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("digraph has loops at {0:?}; strip them first")]
    Loops(Vec<String>),
    #[error("digraph is not strongly connected")]
    NotStrong,
    #[error("basepoint {0} out of range")]
    BadBasepoint(VertexId),
    #[error("not a polyforest: {0}")]
    NotPolyforest(&'static str),
    #[error("sequence length must be at least 1")]
    EmptySequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Walks leave the basepoint along edges.
    Forward,
    /// Walks leave the basepoint against edges, i.e. forward in the reversed
    /// digraph.
    Reverse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverNode {
    /// Base vertices visited, starting at the root.
    pub path: Vec<VertexId>,
    /// Index of the parent node; `None` only for the root.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverBall {
    pub root: VertexId,
    pub depth: usize,
    pub direction: Direction,
    /// Nodes in breadth-first order; node 0 is the root.
    pub nodes: Vec<CoverNode>,
    /// Number of nodes at each depth `0..=depth`.
    pub counts: Vec<usize>,
}

impl CoverBall {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Running totals of `counts`.
    pub fn cumulative_counts(&self) -> Vec<usize> {
        self.counts
            .iter()
            .scan(0, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect()
    }

    /// Structural check: unique root, every other node's parent precedes it
    /// and is its path minus the last step.
    pub fn is_arborescence(&self) -> bool {
        self.nodes
            .iter()
            .enumerate()
            .all(|(i, node)| match node.parent {
                None => i == 0 && node.path == [self.root],
                Some(p) => {
                    p < i && {
                        let parent = &self.nodes[p].path;
                        node.path.len() == parent.len() + 1
                            && node.path[..parent.len()] == parent[..]
                    }
                }
            })
    }
}

fn oriented(d: &Digraph, direction: Direction) -> std::borrow::Cow<'_, Digraph> {
    match direction {
        Direction::Forward => std::borrow::Cow::Borrowed(d),
        Direction::Reverse => std::borrow::Cow::Owned(d.reverse()),
    }
}

fn require_loopless(d: &Digraph) -> Result<(), CoverError> {
    let loops = d.loop_vertices();
    if loops.is_empty() {
        Ok(())
    } else {
        Err(CoverError::Loops(
            loops.into_iter().map(|v| d.label(v).to_owned()).collect(),
        ))
    }
}

fn require_basepoint(d: &Digraph, v0: VertexId) -> Result<(), CoverError> {
    if v0 < d.vertex_count() {
        Ok(())
    } else {
        Err(CoverError::BadBasepoint(v0))
    }
}

/// Unfolds every walk of at most `radius` steps from `v0`. Distinct walks
/// ending at the same base vertex are distinct nodes.
pub fn build_ball(
    d: &Digraph,
    v0: VertexId,
    radius: usize,
    direction: Direction,
) -> Result<CoverBall, CoverError> {
    require_loopless(d)?;
    require_basepoint(d, v0)?;
    let g = oriented(d, direction);
    let mut nodes = vec![CoverNode {
        path: vec![v0],
        parent: None,
    }];
    let mut counts = vec![1];
    let mut frontier = 0..1;
    for _ in 0..radius {
        let start = nodes.len();
        for i in frontier.clone() {
            let last = *nodes[i].path.last().expect("nonempty path");
            for &w in g.successors(last) {
                let mut path = nodes[i].path.clone();
                path.push(w);
                nodes.push(CoverNode {
                    path,
                    parent: Some(i),
                });
            }
        }
        counts.push(nodes.len() - start);
        frontier = start..nodes.len();
    }
    Ok(CoverBall {
        root: v0,
        depth: radius,
        direction,
        nodes,
        counts,
    })
}

/// Exact walk counts from `v0` of each length `0..=radius`, i.e. the row-`v0`
/// sums of `A^l`.
pub fn walk_counts_from(d: &Digraph, v0: VertexId, radius: usize) -> Vec<BigUint> {
    // x_l[k] = (A^l)[v0][k]; x_{l+1} = x_l A.
    let n = d.vertex_count();
    let mut x = vec![BigUint::zero(); n];
    x[v0] = BigUint::from(1u32);
    let mut out = Vec::with_capacity(radius + 1);
    out.push(BigUint::from(1u32));
    for _ in 0..radius {
        let mut next = vec![BigUint::zero(); n];
        for (j, xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for &k in d.successors(j) {
                next[k] += xj;
            }
        }
        x = next;
        out.push(x.iter().sum());
    }
    out
}

/// `|V(B_{v0}(L))| = sum_{l=0}^{L} sum_k (A^l)[v0][k]`.
pub fn ball_size_power_formula(
    d: &Digraph,
    v0: VertexId,
    radius: usize,
) -> Result<BigUint, CoverError> {
    require_loopless(d)?;
    require_basepoint(d, v0)?;
    Ok(walk_counts_from(d, v0, radius).into_iter().sum())
}

/// Acyclic with a forest as underlying undirected graph.
pub fn is_polyforest(d: &Digraph) -> bool {
    polyforest_check(d).is_ok()
}

fn polyforest_check(d: &Digraph) -> Result<(), CoverError> {
    if !is_acyclic(d) {
        return Err(CoverError::NotPolyforest("has a directed cycle"));
    }
    let mut parent: Vec<usize> = (0..d.vertex_count()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (u, v) in d.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return Err(CoverError::NotPolyforest("underlying graph has a cycle"));
        }
        parent[a] = b;
    }
    Ok(())
}

/// Magnitude function `|V| - |E| e^{-t}` of a polyforest.
pub fn polyforest_magnitude<T: Scalar>(f: &Digraph, t: T) -> Result<T, CoverError> {
    polyforest_check(f)?;
    let (v, e) = (T::of(f.vertex_count() as f64), T::of(f.edge_count() as f64));
    Ok(v - e * (-t).exp())
}

/// Natural log of a big unsigned integer; `-inf` for zero.
pub fn big_ln(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map_or(f64::NEG_INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let head = (n >> shift).to_f64().expect("64-bit head");
    head.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Magnitude function of a polytree with `vertex_count` vertices:
/// `n - (n - 1) e^{-t}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallMagnitudeFn {
    pub vertex_count: BigUint,
}

impl BallMagnitudeFn {
    pub fn value<T: Scalar>(&self, t: T) -> T {
        let n = T::of(self.vertex_count.to_f64().unwrap_or(f64::INFINITY));
        if t == T::infinity() {
            return n;
        }
        n - (n - T::one()) * (-t).exp()
    }

    /// `log` of the magnitude, evaluated as `log1p((n-1)(1-e^{-t}))` with the
    /// count kept in the log domain, so it stays finite for any count and is
    /// exactly 0 at `t = 0`.
    pub fn ln_value<T: Scalar>(&self, t: T) -> T {
        let a = &self.vertex_count - BigUint::from(1u32);
        let c = -(-t).exp_m1();
        if a.is_zero() || c == T::zero() {
            return T::zero();
        }
        let ln_ac = T::of(big_ln(&a)) + c.ln();
        if ln_ac < T::of(30.0) {
            ln_ac.exp().ln_1p()
        } else {
            ln_ac + (-ln_ac).exp().ln_1p()
        }
    }
}

/// Magnitude function of `B_{v0}(L)` in the given direction.
pub fn ball_magnitude_fn(
    d: &Digraph,
    v0: VertexId,
    radius: usize,
    direction: Direction,
) -> Result<BallMagnitudeFn, CoverError> {
    let g = oriented(d, direction);
    Ok(BallMagnitudeFn {
        vertex_count: ball_size_power_formula(&g, v0, radius)?,
    })
}

pub fn ball_magnitude<T: Scalar>(
    d: &Digraph,
    v0: VertexId,
    radius: usize,
    t: T,
    direction: Direction,
) -> Result<T, CoverError> {
    Ok(ball_magnitude_fn(d, v0, radius, direction)?.value(t))
}

pub fn ball_log_magnitude<T: Scalar>(
    d: &Digraph,
    v0: VertexId,
    radius: usize,
    t: T,
    direction: Direction,
) -> Result<T, CoverError> {
    Ok(ball_magnitude_fn(d, v0, radius, direction)?.ln_value(t))
}

/// `s_L = L^{-1} log Mag(B_{v0}(L), t)` for `L = 1..=lmax`, from exact
/// counts. Requires a strong loopless digraph.
pub fn volume_entropy_sequence<T: Scalar>(
    d: &Digraph,
    v0: VertexId,
    t: T,
    lmax: usize,
) -> Result<Vec<T>, CoverError> {
    require_loopless(d)?;
    require_basepoint(d, v0)?;
    if !d.is_strong() {
        return Err(CoverError::NotStrong);
    }
    if lmax == 0 {
        return Err(CoverError::EmptySequence);
    }
    let per_depth = walk_counts_from(d, v0, lmax);
    let mut total = per_depth[0].clone();
    let mut out = Vec::with_capacity(lmax);
    for (l, c) in per_depth.iter().enumerate().skip(1) {
        total += c;
        let f = BallMagnitudeFn {
            vertex_count: total.clone(),
        };
        out.push(f.ln_value(t) / T::of(l as f64));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plastic() -> Digraph {
        Digraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 0)])
    }

    fn cycle3() -> Digraph {
        Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)])
    }

    #[test]
    fn ball_on_cycle() {
        let b = build_ball(&cycle3(), 0, 2, Direction::Forward).unwrap();
        let paths: Vec<_> = b.nodes.iter().map(|n| n.path.clone()).collect();
        assert_eq!(paths, vec![vec![0], vec![0, 1], vec![0, 1, 2]]);
        assert_eq!(b.counts, vec![1, 1, 1]);
        assert!(b.is_arborescence());
    }

    #[test]
    fn ball_on_plastic() {
        let b = build_ball(&plastic(), 0, 3, Direction::Forward).unwrap();
        assert_eq!(b.cumulative_counts(), vec![1, 2, 4, 6]);
        assert!(b.is_arborescence());
        let b0 = build_ball(&plastic(), 2, 0, Direction::Reverse).unwrap();
        assert_eq!(b0.node_count(), 1);
    }

    #[test]
    fn loops_rejected() {
        let g = Digraph::from_edges(2, [(0, 1), (1, 1)]);
        assert_eq!(
            build_ball(&g, 0, 2, Direction::Forward).unwrap_err(),
            CoverError::Loops(vec!["1".into()])
        );
        assert!(ball_size_power_formula(&g, 0, 2).is_err());
    }

    #[test]
    fn power_formula() {
        for l in 0..6 {
            assert_eq!(
                ball_size_power_formula(&cycle3(), 1, l).unwrap(),
                BigUint::from(l as u32 + 1)
            );
        }
        assert_eq!(
            ball_size_power_formula(&plastic(), 0, 4).unwrap(),
            BigUint::from(9u32)
        );
    }

    #[test]
    fn polyforest_examples() {
        let single = Digraph::from_edges(1, []);
        assert_eq!(polyforest_magnitude(&single, 3.0f64).unwrap(), 1.0);
        let e = Digraph::from_edges(2, [(0, 1)]);
        for t in [0.1f64, 1.0, 5.0] {
            assert!((polyforest_magnitude(&e, t).unwrap() - (2.0 - (-t).exp())).abs() < 1e-15);
        }
        let diamond = Digraph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert!(polyforest_magnitude(&diamond, 1.0f64).is_err());
        assert!(polyforest_magnitude(&cycle3(), 1.0f64).is_err());
        assert!(polyforest_magnitude(&Digraph::from_edges(2, [(0, 1), (1, 0)]), 1.0f64).is_err());
    }

    #[test]
    fn ball_magnitude_values() {
        let m: f64 = ball_magnitude(&plastic(), 0, 3, f64::INFINITY, Direction::Forward).unwrap();
        assert_eq!(m, 6.0);
        let m: f64 = ball_magnitude(&plastic(), 0, 3, 2f64.ln(), Direction::Forward).unwrap();
        assert!((m - 3.5).abs() < 1e-12);
        for t in [0.0f64, 1.0, 100.0] {
            let m = ball_magnitude(&plastic(), 1, 0, t, Direction::Reverse).unwrap();
            assert_eq!(m, 1.0);
        }
        let lm: f64 = ball_log_magnitude(&plastic(), 0, 3, 2f64.ln(), Direction::Forward).unwrap();
        assert!((lm - 3.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_magnitude_huge_counts() {
        let f = BallMagnitudeFn {
            vertex_count: BigUint::from(1u32) << 5000usize,
        };
        let v: f64 = f.ln_value(100.0);
        assert!((v - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(f.ln_value(0.0f64), 0.0);
    }

    #[test]
    fn sequence_at_zero_scale_vanishes() {
        let s = volume_entropy_sequence(&plastic(), 0, 0.0f64, 50).unwrap();
        assert!(s.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sequence_preconditions() {
        let e = Digraph::from_edges(2, [(0, 1)]);
        assert_eq!(
            volume_entropy_sequence(&e, 0, 1.0f64, 5),
            Err(CoverError::NotStrong)
        );
        assert_eq!(
            volume_entropy_sequence(&plastic(), 0, 1.0f64, 0),
            Err(CoverError::EmptySequence)
        );
    }
}
