//! Simple digraphs and the combinatorial operations every other module
//! builds on: connectivity, hop distances and walk counts.

mod io;
mod random;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

pub use io::{load_digraph, parse_digraph, write_edge_list, Format, Loaded};
pub use random::{
    bernoulli_edge_subsample, erdos_renyi, erdos_renyi_with, seeded_stream, subsample_with,
};

/// Dense vertex index. Within one [`Digraph`] ids are exactly `0..n`.
pub type VertexId = usize;

/// A directed edge `(tail, head)`.
pub type Edge = (VertexId, VertexId);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown vertex label {0:?}")]
    UnknownLabel(String),
    #[error("graph has no vertices")]
    Empty,
    #[error("i/o error: {0}")]
    Io(String),
}

/// Finite simple digraph. Immutable once built.
///
/// Every vertex carries a label; the label map is injective. Graphs built
/// without explicit labels use the decimal vertex index.
#[derive(Debug, Clone)]
pub struct Digraph {
    labels: Vec<String>,
    out: Vec<Vec<VertexId>>,
    inc: Vec<Vec<VertexId>>,
    edge_count: usize,
    has_loops: OnceLock<bool>,
    is_strong: OnceLock<bool>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.out == other.out
    }
}

impl Eq for Digraph {}

impl Digraph {
    /// Builds a digraph on `n` vertices labelled by index. Repeated edges
    /// collapse to one.
    ///
    /// Panics if an endpoint is out of range.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        Self::build((0..n).map(|i| i.to_string()).collect(), edges).0
    }

    /// Builds a labelled digraph, returning the number of collapsed duplicate
    /// edges alongside it.
    pub fn with_labels(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<(Self, usize), GraphError> {
        let mut seen = std::collections::HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(GraphError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self::build(labels, edges))
    }

    fn build(labels: Vec<String>, edges: impl IntoIterator<Item = Edge>) -> (Self, usize) {
        let n = labels.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut raw = 0usize;
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u},{v}) out of range for n={n}");
            out[u].push(v);
            raw += 1;
        }
        let mut edge_count = 0;
        for (u, succ) in out.iter_mut().enumerate() {
            succ.sort_unstable();
            succ.dedup();
            edge_count += succ.len();
            for &v in succ.iter() {
                inc[v].push(u);
            }
        }
        let g = Digraph {
            labels,
            out,
            inc,
            edge_count,
            has_loops: OnceLock::new(),
            is_strong: OnceLock::new(),
        };
        (g, raw - edge_count)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn find_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l == label)
    }

    /// Out-neighbours of `v`, sorted ascending.
    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.out[v]
    }

    /// In-neighbours of `v`, sorted ascending.
    pub fn predecessors(&self, v: VertexId) -> &[VertexId] {
        &self.inc[v]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.inc[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, succ)| succ.iter().map(move |&v| (u, v)))
    }

    /// Edge set keyed by labels, independent of vertex numbering.
    pub fn labelled_edges(&self) -> BTreeSet<(String, String)> {
        self.edges()
            .map(|(u, v)| (self.labels[u].clone(), self.labels[v].clone()))
            .collect()
    }

    /// 0/1 adjacency matrix, row-major.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0u8; n]; n];
        for (u, v) in self.edges() {
            a[u][v] = 1;
        }
        a
    }

    pub fn loop_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count())
            .filter(|&v| self.has_edge(v, v))
            .collect()
    }

    pub fn has_loops(&self) -> bool {
        *self
            .has_loops
            .get_or_init(|| (0..self.vertex_count()).any(|v| self.has_edge(v, v)))
    }

    /// Whether every vertex reaches every other. The empty graph is not
    /// strong; a single vertex is.
    pub fn is_strong(&self) -> bool {
        *self.is_strong.get_or_init(|| {
            let n = self.vertex_count();
            n > 0 && strongly_connected_components(self).len() == 1
        })
    }

    /// Same vertices and labels with every edge flipped.
    pub fn reverse(&self) -> Digraph {
        Digraph {
            labels: self.labels.clone(),
            out: self.inc.clone(),
            inc: self.out.clone(),
            edge_count: self.edge_count,
            has_loops: OnceLock::new(),
            is_strong: OnceLock::new(),
        }
    }

    /// Drops every self-loop.
    pub fn without_loops(&self) -> Digraph {
        let edges: Vec<Edge> = self.edges().filter(|(u, v)| u != v).collect();
        Self::build(self.labels.clone(), edges).0
    }

    /// Subgraph induced by `keep`, re-indexed densely in the order given.
    /// Labels carry over.
    pub fn induced(&self, keep: &[VertexId]) -> Digraph {
        let mut index = HashMap::with_capacity(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            index.insert(v, i);
        }
        let labels = keep.iter().map(|&v| self.labels[v].clone()).collect();
        let mut edges = Vec::new();
        for (i, &u) in keep.iter().enumerate() {
            edges.extend(
                self.out[u]
                    .iter()
                    .filter_map(|v| index.get(v).map(|&j| (i, j))),
            );
        }
        Self::build(labels, edges).0
    }

    /// Keeps the vertex set and an edge subset chosen by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(Edge) -> bool) -> Digraph {
        let edges: Vec<Edge> = self.edges().filter(|&e| keep(e)).collect();
        Self::build(self.labels.clone(), edges).0
    }
}

/// Connectivity summary of a digraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub is_strong: bool,
    pub has_loops: bool,
    pub weak_component_count: usize,
}

pub fn classify(d: &Digraph) -> Classification {
    Classification {
        is_strong: d.is_strong(),
        has_loops: d.has_loops(),
        weak_component_count: weak_components(d).len(),
    }
}

/// Strongly connected components (Tarjan), each sorted ascending. Components
/// come out in reverse topological order of the condensation.
pub fn strongly_connected_components(d: &Digraph) -> Vec<Vec<VertexId>> {
    let n = d.vertex_count();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;

    // Iterative DFS: frames hold (vertex, next successor position).
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut frames: Vec<(VertexId, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if let Some(&w) = d.successors(v).get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Weakly connected components, each sorted ascending, ordered by their
/// smallest vertex.
pub fn weak_components(d: &Digraph) -> Vec<Vec<VertexId>> {
    let n = d.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in d.successors(v).iter().chain(d.predecessors(v)) {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Induced subgraph on the largest weak component. Ties go to the component
/// holding the smallest original vertex id. Labels are kept, so the result
/// maps back to the input through them.
pub fn largest_weak_component(d: &Digraph) -> Digraph {
    let comps = weak_components(d);
    // Components are already ordered by minimum id, so the first maximum wins.
    let best = comps
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.len().cmp(&b.len()).then(j.cmp(i)))
        .map(|(_, c)| c.clone())
        .unwrap_or_default();
    d.induced(&best)
}

/// Whether the digraph has no directed cycle (loops count as cycles).
pub fn is_acyclic(d: &Digraph) -> bool {
    topological_order(d).is_some()
}

/// Kahn's algorithm; `None` when a cycle exists.
pub fn topological_order(d: &Digraph) -> Option<Vec<VertexId>> {
    let n = d.vertex_count();
    let mut indeg: Vec<usize> = (0..n).map(|v| d.in_degree(v)).collect();
    let mut queue: VecDeque<VertexId> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in d.successors(v) {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// All-pairs hop distances; `None` marks an unreachable pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<Option<u32>>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: VertexId, k: VertexId) -> Option<u32> {
        self.d[j * self.n + k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Option<u32>]> {
        self.d.chunks(self.n.max(1))
    }

    pub fn all_finite(&self) -> bool {
        self.d.iter().all(Option::is_some)
    }
}

/// Hop-count Lawvere metric by one BFS per vertex.
pub fn shortest_path_matrix(d: &Digraph) -> DistanceMatrix {
    let n = d.vertex_count();
    let mut dist = vec![None; n * n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        let row = &mut dist[s * n..(s + 1) * n];
        row[s] = Some(0);
        queue.clear();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            let dv = row[v].expect("queued vertex has a distance");
            for &w in d.successors(v) {
                if row[w].is_none() {
                    row[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
    }
    DistanceMatrix { n, d: dist }
}

/// Exact walk counts per start vertex: entry `v` is the row-`v` sum of
/// `A^len`.
pub fn walks_from_each(d: &Digraph, len: usize) -> Vec<BigUint> {
    // x_N = A^N 1, iterated as x_{k+1}[v] = sum of x_k over successors.
    let n = d.vertex_count();
    let mut x = vec![BigUint::one(); n];
    for _ in 0..len {
        x = (0..n)
            .map(|v| {
                d.successors(v)
                    .iter()
                    .fold(BigUint::zero(), |acc, &w| acc + &x[w])
            })
            .collect();
    }
    x
}

/// Total number of directed walks with `len` edges: the sum of all entries
/// of `A^len`. Vertex repetition is allowed.
pub fn count_walks(d: &Digraph, len: usize) -> BigUint {
    walks_from_each(d, len).into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle3() -> Digraph {
        Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)])
    }

    fn plastic() -> Digraph {
        Digraph::from_edges(3, [(0, 1), (1, 0), (1, 2), (2, 0)])
    }

    #[test]
    fn reverse_examples() {
        let g = Digraph::from_edges(2, [(0, 1)]);
        assert_eq!(g.reverse().edges().collect::<Vec<_>>(), vec![(1, 0)]);
        let r = cycle3().reverse();
        let e: BTreeSet<_> = r.edges().collect();
        assert_eq!(e, BTreeSet::from([(1, 0), (2, 1), (0, 2)]));
        assert_eq!(plastic().reverse().reverse(), plastic());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&cycle3()),
            Classification {
                is_strong: true,
                has_loops: false,
                weak_component_count: 1
            }
        );
        let c = classify(&Digraph::from_edges(3, [(0, 1)]));
        assert!(!c.is_strong);
        assert_eq!(c.weak_component_count, 2);
        assert!(classify(&Digraph::from_edges(1, [(0, 0)])).has_loops);
    }

    #[test]
    fn largest_component_prefers_size_then_min_id() {
        let g = Digraph::from_edges(5, [(0, 1), (2, 3), (3, 4)]);
        let c = largest_weak_component(&g);
        assert_eq!(c.labels(), &["2", "3", "4"]);

        // {0,1} and {5,6} tie; 0 wins.
        let g = Digraph::from_edges(7, [(1, 0), (5, 6), (3, 3)]);
        let c = largest_weak_component(&g);
        assert_eq!(c.labels(), &["0", "1"]);

        let p = plastic();
        assert_eq!(largest_weak_component(&p), p);
    }

    #[test]
    fn distances() {
        let g = Digraph::from_edges(2, [(0, 1)]);
        let d = shortest_path_matrix(&g);
        assert_eq!(d.get(0, 1), Some(1));
        assert_eq!(d.get(1, 0), None);
        let d = shortest_path_matrix(&cycle3());
        assert_eq!((d.get(0, 2), d.get(2, 0)), (Some(2), Some(1)));
        let d = shortest_path_matrix(&plastic());
        assert_eq!((d.get(0, 2), d.get(2, 1)), (Some(2), Some(2)));
    }

    #[test]
    fn walk_counts() {
        assert_eq!(count_walks(&cycle3(), 5), BigUint::from(3u32));
        let k3 = Digraph::from_edges(3, [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]);
        assert_eq!(count_walks(&k3, 4), BigUint::from(48u32));
        // A^3 = A + I for the plastic digraph, so the entry sum is 4 + 3.
        assert_eq!(count_walks(&plastic(), 3), BigUint::from(7u32));
        assert_eq!(count_walks(&plastic(), 2), BigUint::from(5u32));
        assert_eq!(count_walks(&plastic(), 0), BigUint::from(3u32));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let r = Digraph::with_labels(vec!["a".into(), "a".into()], []);
        assert_eq!(r.unwrap_err(), GraphError::DuplicateLabel("a".into()));
    }

    #[test]
    fn scc_of_plastic_with_tail() {
        let g = Digraph::from_edges(4, [(3, 0), (0, 1), (1, 0), (1, 2), (2, 0)]);
        let mut comps = strongly_connected_components(&g);
        comps.sort();
        assert_eq!(comps, vec![vec![0, 1, 2], vec![3]]);
        assert!(!is_acyclic(&g));
        assert!(is_acyclic(&Digraph::from_edges(
            3,
            [(0, 1), (1, 2), (0, 2)]
        )));
    }
}
