//! Flow graphs: validation, series and parallel composition, sub-flow-graph
//! hom-objects and the max-plus magnitude built from their entropies.

pub mod fixtures;
mod subflow;
mod tropical;

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{Digraph, Edge, VertexId};
use crate::spectral::SpectralError;

pub use subflow::{subflow_hom, SubflowExtractor};
pub use tropical::{
    principal_solutions, tropical_magnitude, tropical_similarity_matrix,
    tropical_similarity_matrix_with, PrincipalSolutions, TropicalMagnitude, TropicalMatrix,
    UnitConvention,
};

#[derive(Debug, Error, PartialEq)]
pub enum FlowError {
    #[error("graph has no vertices")]
    Empty,
    #[error("flow graphs are loopless; loops at {0:?}")]
    HasLoops(Vec<String>),
    #[error("no source/target: no vertex has in-degree 0")]
    NoSource,
    #[error("no source/target: no vertex has out-degree 0")]
    NoTarget,
    #[error("multiple sources {0:?}")]
    MultipleSources(Vec<String>),
    #[error("multiple targets {0:?}")]
    MultipleTargets(Vec<String>),
    #[error("source and target coincide")]
    SourceIsTarget,
    #[error("entry edge not unique: source has out-degree {0}")]
    EntryNotUnique(usize),
    #[error("exit edge not unique: target has in-degree {0}")]
    ExitNotUnique(usize),
    #[error("identifying source with target does not give a strong digraph")]
    ClosureNotStrong,
    #[error("composition needs at least one flow graph")]
    EmptyComposition,
    #[error("parallel branches share a source-to-target edge; the result would be a multigraph")]
    ParallelMultiEdge,
    #[error("edge ({0}, {1}) is not in the flow graph")]
    EdgeNotInGraph(String, String),
    #[error("composition broke a flow-graph invariant: {0}")]
    CompositionInvariant(Box<FlowError>),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Digraph with one source, one target, unique entry and exit edges, and a
/// strong closure (source identified with target). Loopless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowGraph {
    graph: Digraph,
    source: VertexId,
    target: VertexId,
}

impl FlowGraph {
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn into_graph(self) -> Digraph {
        self.graph
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn entry_edge(&self) -> Edge {
        (self.source, self.graph.successors(self.source)[0])
    }

    pub fn exit_edge(&self) -> Edge {
        (self.graph.predecessors(self.target)[0], self.target)
    }

    /// Edges in lexicographic order; this order indexes tropical matrices.
    pub fn edges(&self) -> Vec<Edge> {
        self.graph.edges().collect()
    }

    pub fn edge_labels(&self, (u, v): Edge) -> (&str, &str) {
        (self.graph.label(u), self.graph.label(v))
    }
}

fn labels_of(d: &Digraph, vs: &[VertexId]) -> Vec<String> {
    vs.iter().map(|&v| d.label(v).to_owned()).collect()
}

/// Checks every flow-graph clause, reporting the first one violated.
pub fn validate_flow(d: &Digraph) -> Result<FlowGraph, FlowError> {
    let n = d.vertex_count();
    if n == 0 {
        return Err(FlowError::Empty);
    }
    let loops = d.loop_vertices();
    if !loops.is_empty() {
        return Err(FlowError::HasLoops(labels_of(d, &loops)));
    }
    let sources: Vec<_> = (0..n).filter(|&v| d.in_degree(v) == 0).collect();
    let targets: Vec<_> = (0..n).filter(|&v| d.out_degree(v) == 0).collect();
    let source = match sources.as_slice() {
        [] => return Err(FlowError::NoSource),
        [s] => *s,
        _ => return Err(FlowError::MultipleSources(labels_of(d, &sources))),
    };
    let target = match targets.as_slice() {
        [] => return Err(FlowError::NoTarget),
        [t] => *t,
        _ => return Err(FlowError::MultipleTargets(labels_of(d, &targets))),
    };
    if source == target {
        return Err(FlowError::SourceIsTarget);
    }
    if d.out_degree(source) != 1 {
        return Err(FlowError::EntryNotUnique(d.out_degree(source)));
    }
    if d.in_degree(target) != 1 {
        return Err(FlowError::ExitNotUnique(d.in_degree(target)));
    }
    if !closure_is_strong(d, source, target) {
        return Err(FlowError::ClosureNotStrong);
    }
    Ok(FlowGraph {
        graph: d.clone(),
        source,
        target,
    })
}

impl TryFrom<Digraph> for FlowGraph {
    type Error = FlowError;

    fn try_from(d: Digraph) -> Result<Self, FlowError> {
        let f = validate_flow(&d)?;
        Ok(FlowGraph { graph: d, ..f })
    }
}

fn closure_is_strong(d: &Digraph, source: VertexId, target: VertexId) -> bool {
    let merge = |v: VertexId| if v == target { source } else { v };
    let n = d.vertex_count();
    // Index target's slot by the last vertex so ids stay dense.
    let relabel = |v: VertexId| {
        let v = merge(v);
        if v == n - 1 {
            target
        } else {
            v
        }
    };
    let edges: Vec<Edge> = d.edges().map(|(u, v)| (relabel(u), relabel(v))).collect();
    let closed = Digraph::from_edges(n - 1, edges.into_iter().filter(|(u, v)| u != v));
    closed.is_strong()
}

fn fresh_label(taken: &mut HashSet<String>, wanted: &str) -> String {
    let mut l = wanted.to_owned();
    while taken.contains(&l) {
        l.push('\'');
    }
    taken.insert(l.clone());
    l
}

/// Glues the exit edge of `a` onto the entry edge of `b`: tails are
/// identified and heads are identified. Glued vertices keep `a`'s labels.
fn glue(a: &FlowGraph, b: &FlowGraph) -> Result<FlowGraph, FlowError> {
    let (x, y) = a.exit_edge();
    let (c, d) = b.entry_edge();
    let n_a = a.graph.vertex_count();
    let mut labels: Vec<String> = a.graph.labels().to_vec();
    let mut taken: HashSet<String> = labels.iter().cloned().collect();
    let mut map = vec![usize::MAX; b.graph.vertex_count()];
    map[c] = x;
    map[d] = y;
    for v in 0..b.graph.vertex_count() {
        if v != c && v != d {
            map[v] = n_a + (labels.len() - n_a);
            labels.push(fresh_label(&mut taken, b.graph.label(v)));
        }
    }
    let edges = a
        .graph
        .edges()
        .chain(b.graph.edges().map(|(u, v)| (map[u], map[v])));
    let (g, _) = Digraph::with_labels(labels, edges).expect("labels made unique");
    validate_flow(&g).map_err(|e| FlowError::CompositionInvariant(Box::new(e)))
}

/// Series product, folded left to right.
pub fn series_compose(fs: &[FlowGraph]) -> Result<FlowGraph, FlowError> {
    let (first, rest) = fs.split_first().ok_or(FlowError::EmptyComposition)?;
    rest.iter()
        .try_fold(first.clone(), |acc, next| glue(&acc, next))
}

/// Parallel bundle: all sources become one fork vertex, all targets one join
/// vertex, and a fresh entry edge and exit edge are attached so the result is
/// again a flow graph.
pub fn parallel_compose(fs: &[FlowGraph]) -> Result<FlowGraph, FlowError> {
    let first = fs.first().ok_or(FlowError::EmptyComposition)?;
    let mut taken: HashSet<String> = HashSet::new();
    let mut labels = Vec::new();
    let src_label = first.graph.label(first.source).to_owned();
    let tgt_label = first.graph.label(first.target).to_owned();
    labels.push(fresh_label(&mut taken, &format!("{src_label}^in")));
    labels.push(fresh_label(&mut taken, &src_label));
    let (entry, fork) = (0, 1);
    let mut edges = vec![(entry, fork)];
    let mut branch_maps = Vec::with_capacity(fs.len());
    for f in fs {
        let mut map = vec![usize::MAX; f.graph.vertex_count()];
        for v in 0..f.graph.vertex_count() {
            if v == f.source {
                map[v] = fork;
            } else if v != f.target {
                map[v] = labels.len();
                labels.push(fresh_label(&mut taken, f.graph.label(v)));
            }
        }
        branch_maps.push(map);
    }
    let join = labels.len();
    labels.push(fresh_label(&mut taken, &tgt_label));
    let exit = labels.len();
    labels.push(fresh_label(&mut taken, &format!("{tgt_label}^out")));
    for (f, map) in fs.iter().zip(&mut branch_maps) {
        map[f.target] = join;
        edges.extend(f.graph.edges().map(|(u, v)| (map[u], map[v])));
    }
    edges.push((join, exit));
    let (g, duplicates) = Digraph::with_labels(labels, edges).expect("labels made unique");
    if duplicates > 0 {
        return Err(FlowError::ParallelMultiEdge);
    }
    validate_flow(&g).map_err(|e| FlowError::CompositionInvariant(Box::new(e)))
}
