use crate::graph::{Digraph, Edge, VertexId};

use super::{validate_flow, FlowError, FlowGraph};

/// Precomputed forward and backward reachability for repeated hom-object
/// queries on one flow graph.
pub struct SubflowExtractor<'a> {
    flow: &'a FlowGraph,
    forward: Vec<Vec<bool>>,
    backward: Vec<Vec<bool>>,
}

fn reach_from(d: &Digraph, start: VertexId, backward: bool) -> Vec<bool> {
    let mut seen = vec![false; d.vertex_count()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        let next = if backward {
            d.predecessors(u)
        } else {
            d.successors(u)
        };
        for &v in next {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

impl<'a> SubflowExtractor<'a> {
    pub fn new(flow: &'a FlowGraph) -> Self {
        let d = flow.graph();
        let n = d.vertex_count();
        let forward = (0..n).map(|v| reach_from(d, v, false)).collect();
        let backward = (0..n).map(|v| reach_from(d, v, true)).collect();
        SubflowExtractor {
            flow,
            forward,
            backward,
        }
    }

    fn check_edge(&self, (u, v): Edge) -> Result<(), FlowError> {
        let d = self.flow.graph();
        if u < d.vertex_count() && v < d.vertex_count() && d.has_edge(u, v) {
            Ok(())
        } else {
            let name = |x: usize| d.labels().get(x).cloned().unwrap_or_else(|| x.to_string());
            Err(FlowError::EdgeNotInGraph(name(u), name(v)))
        }
    }

    /// The hom-object from `es` to `et`, or `None` when it is empty.
    pub fn hom(&self, es: Edge, et: Edge) -> Result<Option<FlowGraph>, FlowError> {
        self.check_edge(es)?;
        self.check_edge(et)?;
        let d = self.flow.graph();
        if es == et {
            let labels = vec![d.label(es.0).to_owned(), d.label(es.1).to_owned()];
            let (g, _) = Digraph::with_labels(labels, [(0, 1)]).expect("distinct labels");
            return validate_flow(&g).map(Some);
        }
        let (a, b) = es;
        let (c, e) = et;
        let fwd = &self.forward[b];
        let bwd = &self.backward[c];
        let inner: Vec<VertexId> = (0..d.vertex_count())
            .filter(|&v| fwd[v] && bwd[v])
            .collect();
        if inner.is_empty() {
            return Ok(None);
        }
        let mut in_region = vec![false; d.vertex_count()];
        for &v in &inner {
            in_region[v] = true;
        }
        if in_region[a] || in_region[e] || a == e {
            return Ok(None);
        }
        // Single entry, single exit: only es and et may cross the boundary.
        for (u, v) in d.edges() {
            if in_region[u] != in_region[v] && (u, v) != es && (u, v) != et {
                return Ok(None);
            }
        }
        let mut keep = Vec::with_capacity(inner.len() + 2);
        keep.push(a);
        keep.extend_from_slice(&inner);
        keep.push(e);
        let mut index = vec![usize::MAX; d.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let edges = d
            .edges()
            .filter(|&(u, v)| (in_region[u] && in_region[v]) || (u, v) == es || (u, v) == et)
            .map(|(u, v)| (index[u], index[v]));
        let labels = keep.iter().map(|&v| d.label(v).to_owned()).collect();
        let (g, _) = Digraph::with_labels(labels, edges).expect("labels inherited");
        match validate_flow(&g) {
            Ok(f) => Ok(Some(f)),
            Err(_) => Ok(None),
        }
    }
}

/// Induced sub-flow graph with entry edge `es` and exit edge `et`. `None`
/// means the hom-object is empty.
pub fn subflow_hom(f: &FlowGraph, es: Edge, et: Edge) -> Result<Option<FlowGraph>, FlowError> {
    SubflowExtractor::new(f).hom(es, et)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four() -> FlowGraph {
        validate_flow(&Digraph::from_edges(4, [(0, 1), (1, 2), (2, 1), (2, 3)])).unwrap()
    }

    #[test]
    fn whole_graph_is_its_own_hom() {
        let f = four();
        let h = subflow_hom(&f, f.entry_edge(), f.exit_edge())
            .unwrap()
            .unwrap();
        assert_eq!(h, f);
    }

    #[test]
    fn identity_hom_is_single_edge() {
        let f = four();
        for e in f.edges() {
            let h = subflow_hom(&f, e, e).unwrap().unwrap();
            assert_eq!(h.graph().vertex_count(), 2);
            assert_eq!(h.graph().edge_count(), 1);
        }
    }

    #[test]
    fn interior_edges_are_empty() {
        let f = four();
        // (1,2) to (2,3): region {2, 1} contains the tail of (1,2).
        assert_eq!(subflow_hom(&f, (1, 2), (2, 3)).unwrap(), None);
        // Backwards in the flow: nothing between.
        assert_eq!(subflow_hom(&f, (2, 3), (0, 1)).unwrap(), None);
    }

    #[test]
    fn boundary_leak_is_empty() {
        // 0 -> 1 -> 2 -> 3 -> 4 with a bypass 1 -> 3: the region between
        // (1,2) and (2,3) is {2}, clean; between (0,1) and (3,4) it is the
        // whole middle, clean; but (1,2)..(3,4) sees 1 -> 3 entering.
        let g = Digraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (1, 3), (3, 4)]);
        let f = validate_flow(&g).unwrap();
        assert!(subflow_hom(&f, (1, 2), (2, 3)).unwrap().is_some());
        assert!(subflow_hom(&f, (0, 1), (3, 4)).unwrap().is_some());
        assert_eq!(subflow_hom(&f, (1, 2), (3, 4)).unwrap(), None);
    }

    #[test]
    fn unknown_edge_errors() {
        let f = four();
        assert!(matches!(
            subflow_hom(&f, (0, 3), (2, 3)),
            Err(FlowError::EdgeNotInGraph(..))
        ));
        assert!(matches!(
            subflow_hom(&f, (0, 1), (9, 3)),
            Err(FlowError::EdgeNotInGraph(..))
        ));
    }
}
