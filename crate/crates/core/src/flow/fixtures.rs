//! Random flow graphs built from strong blocks of known entropy, and the
//! parallel bundle of series chains used to check the principal-solution
//! formulas.

use rand::Rng;

use crate::graph::{Digraph, Edge, VertexId};

use super::{parallel_compose, series_compose, validate_flow, FlowError, FlowGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// A single interior vertex; acyclic.
    Point,
    TwoCycle,
    ThreeCycle,
    /// Two 2-cycles sharing a vertex; spectral radius `sqrt 2`.
    DoubleTwoCycle,
    /// Complete digraph on three vertices; spectral radius 2.
    CompleteThree,
    /// Characteristic polynomial `x^3 - x - 1`.
    Plastic,
}

const PLASTIC: f64 = 1.324_717_957_244_746;

impl BlockKind {
    pub const ALL: [BlockKind; 6] = [
        BlockKind::Point,
        BlockKind::TwoCycle,
        BlockKind::ThreeCycle,
        BlockKind::DoubleTwoCycle,
        BlockKind::CompleteThree,
        BlockKind::Plastic,
    ];

    /// Closed-form topological entropy.
    pub fn entropy(self) -> f64 {
        match self {
            BlockKind::Point => f64::NEG_INFINITY,
            BlockKind::TwoCycle | BlockKind::ThreeCycle => 0.0,
            BlockKind::DoubleTwoCycle => 0.5 * std::f64::consts::LN_2,
            BlockKind::CompleteThree => std::f64::consts::LN_2,
            BlockKind::Plastic => PLASTIC.ln(),
        }
    }

    /// Interior vertex count and edges; entry at 0, exit from the last.
    fn interior(self) -> (usize, &'static [Edge]) {
        match self {
            BlockKind::Point => (1, &[]),
            BlockKind::TwoCycle => (2, &[(0, 1), (1, 0)]),
            BlockKind::ThreeCycle => (3, &[(0, 1), (1, 2), (2, 0)]),
            BlockKind::DoubleTwoCycle => (3, &[(0, 1), (1, 0), (0, 2), (2, 0)]),
            BlockKind::CompleteThree => (3, &[(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]),
            BlockKind::Plastic => (3, &[(0, 1), (1, 0), (1, 2), (2, 0)]),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> BlockKind {
        BlockKind::ALL[rng.random_range(0..BlockKind::ALL.len())]
    }
}

/// The block wrapped in entry and exit stubs. Labels are `{tag}.s`,
/// `{tag}.0`, ..., `{tag}.t`.
pub fn block(kind: BlockKind, tag: &str) -> FlowGraph {
    let (k, inner) = kind.interior();
    let n = k + 2;
    let mut labels = vec![format!("{tag}.s")];
    labels.extend((0..k).map(|i| format!("{tag}.{i}")));
    labels.push(format!("{tag}.t"));
    let edges = std::iter::once((0, 1))
        .chain(inner.iter().map(|&(u, v)| (u + 1, v + 1)))
        .chain(std::iter::once((k, n - 1)));
    let (g, _) = Digraph::with_labels(labels, edges).expect("distinct labels");
    validate_flow(&g).expect("blocks are flow graphs")
}

/// Random series/parallel composition tree of blocks, at most `depth` deep.
pub fn random_flow<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> FlowGraph {
    let mut counter = 0;
    random_flow_inner(rng, depth, &mut counter)
}

fn random_flow_inner<R: Rng + ?Sized>(rng: &mut R, depth: u32, counter: &mut usize) -> FlowGraph {
    if depth == 0 || rng.random_bool(0.4) {
        *counter += 1;
        return block(BlockKind::random(rng), &format!("b{counter}"));
    }
    let k = rng.random_range(2..=3);
    let parts: Vec<FlowGraph> = (0..k)
        .map(|_| random_flow_inner(rng, depth - 1, counter))
        .collect();
    let composed = if rng.random_bool(0.5) {
        series_compose(&parts)
    } else {
        parallel_compose(&parts)
    };
    composed.expect("blocks have interior vertices, so composition stays valid")
}

/// Parallel bundle of series chains. `backbone[k][j]` is the edge between
/// block `j` and block `j + 1` of branch `k` (`j = 0` is the edge out of the
/// fork, `j = J_k` the edge into the join).
#[derive(Debug, Clone)]
pub struct Bundle {
    pub flow: FlowGraph,
    pub blocks: Vec<Vec<BlockKind>>,
    pub backbone: Vec<Vec<Edge>>,
}

impl Bundle {
    pub fn entry(&self) -> Edge {
        self.flow.entry_edge()
    }

    pub fn exit(&self) -> Edge {
        self.flow.exit_edge()
    }
}

pub fn bundle(blocks: Vec<Vec<BlockKind>>) -> Result<Bundle, FlowError> {
    if blocks.is_empty() || blocks.iter().any(Vec::is_empty) {
        return Err(FlowError::EmptyComposition);
    }
    let branches = blocks
        .iter()
        .enumerate()
        .map(|(k, chain)| {
            let parts: Vec<FlowGraph> = chain
                .iter()
                .enumerate()
                .map(|(j, &kind)| block(kind, &format!("b{k}.{}", j + 1)))
                .collect();
            series_compose(&parts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let flow = parallel_compose(&branches)?;
    let fork = flow.entry_edge().1;
    let join = flow.exit_edge().0;
    let g = flow.graph();
    let id = |l: String| -> VertexId { g.find_label(&l).expect("block label survives gluing") };
    // A block's entry vertex carries the label of the previous block's
    // target after gluing.
    let resolve = |k: usize, j: usize, local: usize| -> VertexId {
        if local == 0 && j > 1 {
            id(format!("b{k}.{}.t", j - 1))
        } else {
            id(format!("b{k}.{j}.{local}"))
        }
    };
    let backbone = blocks
        .iter()
        .enumerate()
        .map(|(k, chain)| {
            let jn = chain.len();
            let mut row = vec![(fork, resolve(k, 1, 0))];
            for (j, kind) in chain.iter().enumerate().map(|(j, b)| (j + 1, b)) {
                let tail = resolve(k, j, kind.interior().0 - 1);
                let head = if j == jn {
                    join
                } else {
                    id(format!("b{k}.{j}.t"))
                };
                row.push((tail, head));
            }
            row
        })
        .collect();
    Ok(Bundle {
        flow,
        blocks,
        backbone,
    })
}

/// Bundle with `2..=max_branches` branches of `1..=max_len` random blocks.
pub fn random_bundle<R: Rng + ?Sized>(rng: &mut R, max_branches: usize, max_len: usize) -> Bundle {
    let k = rng.random_range(2..=max_branches.max(2));
    let blocks = (0..k)
        .map(|_| {
            let j = rng.random_range(1..=max_len.max(1));
            (0..j).map(|_| BlockKind::random(rng)).collect()
        })
        .collect();
    bundle(blocks).expect("bundles of blocks are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::seeded_stream;
    use crate::spectral::topological_entropy;

    #[test]
    fn block_entropies_match_closed_forms() {
        for kind in BlockKind::ALL {
            let f = block(kind, "x");
            let h = topological_entropy::<f64>(f.graph()).unwrap().value();
            let want = kind.entropy();
            if want.is_infinite() {
                assert_eq!(h, want);
            } else {
                assert!((h - want).abs() < 1e-10, "{kind:?}: {h} vs {want}");
            }
        }
    }

    #[test]
    fn bundle_backbone_edges_exist() {
        let mut rng = seeded_stream(7, 0);
        for _ in 0..20 {
            let b = random_bundle(&mut rng, 4, 4);
            for (row, chain) in b.backbone.iter().zip(&b.blocks) {
                assert_eq!(row.len(), chain.len() + 1);
                for &(u, v) in row {
                    assert!(b.flow.graph().has_edge(u, v));
                }
            }
        }
    }

    #[test]
    fn trivial_bundle_has_figure_shape() {
        let b = bundle(vec![vec![BlockKind::Point; 2]; 3]).unwrap();
        assert_eq!(b.flow.graph().vertex_count(), 10);
    }

    #[test]
    fn random_flows_are_valid() {
        let mut rng = seeded_stream(11, 0);
        for _ in 0..50 {
            let f = random_flow(&mut rng, 3);
            assert!(validate_flow(f.graph()).is_ok());
        }
    }
}
