use rayon::prelude::*;

use crate::graph::Edge;
use crate::linalg::Matrix;
use crate::spectral::topological_entropy;
use crate::{ext_eq, Scalar};

use super::{FlowError, FlowGraph, SubflowExtractor};

/// Value assigned to the identity hom-objects (single edges).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnitConvention {
    /// `log` of the spectral radius of a single edge, i.e. `-inf`.
    #[default]
    NegInfinity,
    /// Force the diagonal to the max-plus multiplicative unit `0`.
    Zero,
}

/// Entropies of hom-objects between edges, indexed by `edges`.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalMatrix<T> {
    pub edges: Vec<Edge>,
    pub m: Matrix<T>,
}

impl<T: Scalar> TropicalMatrix<T> {
    pub fn new(edges: Vec<Edge>, m: Matrix<T>) -> Self {
        assert_eq!(m.rows(), edges.len());
        assert_eq!(m.cols(), edges.len());
        TropicalMatrix { edges, m }
    }

    /// Matrix without edge bookkeeping; edges are numbered `(i, i)`.
    pub fn from_matrix(m: Matrix<T>) -> Self {
        let edges = (0..m.rows()).map(|i| (i, i)).collect();
        TropicalMatrix::new(edges, m)
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, e: Edge) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }
}

pub fn tropical_similarity_matrix<T: Scalar>(
    f: &FlowGraph,
) -> Result<TropicalMatrix<T>, FlowError> {
    tropical_similarity_matrix_with(f, UnitConvention::default())
}

pub fn tropical_similarity_matrix_with<T: Scalar>(
    f: &FlowGraph,
    unit: UnitConvention,
) -> Result<TropicalMatrix<T>, FlowError> {
    let edges = f.edges();
    let ex = SubflowExtractor::new(f);
    let rows: Vec<Vec<T>> = edges
        .par_iter()
        .map(|&es| {
            edges
                .iter()
                .map(|&et| {
                    if es == et && unit == UnitConvention::Zero {
                        return Ok(T::zero());
                    }
                    match ex.hom(es, et)? {
                        None => Ok(T::neg_infinity()),
                        Some(h) => Ok(topological_entropy::<T>(h.graph())?.value()),
                    }
                })
                .collect::<Result<Vec<T>, FlowError>>()
        })
        .collect::<Result<_, _>>()?;
    let n = edges.len();
    let m = Matrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(TropicalMatrix::new(edges, m))
}

/// Negated row maxima (`v_hat`) and negated column maxima (`w_hat`).
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalSolutions<T> {
    pub v_hat: Vec<T>,
    pub w_hat: Vec<T>,
}

pub fn principal_solutions<T: Scalar>(z: &TropicalMatrix<T>) -> PrincipalSolutions<T> {
    let n = z.size();
    let fold = |it: &mut dyn Iterator<Item = T>| -it.fold(T::neg_infinity(), T::max);
    let v_hat = (0..n)
        .map(|s| fold(&mut (0..n).map(|t| z.m[(s, t)])))
        .collect();
    let w_hat = (0..n)
        .map(|t| fold(&mut (0..n).map(|s| z.m[(s, t)])))
        .collect();
    PrincipalSolutions { v_hat, w_hat }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TropicalMagnitude<T> {
    Value(T),
    Undefined { lhs: T, rhs: T },
}

impl<T: Scalar> TropicalMagnitude<T> {
    pub fn value(self) -> Option<T> {
        match self {
            TropicalMagnitude::Value(v) => Some(v),
            TropicalMagnitude::Undefined { .. } => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, TropicalMagnitude::Value(_))
    }
}

/// Max-plus magnitude: defined when `max v_hat == max w_hat`.
pub fn tropical_magnitude<T: Scalar>(z: &TropicalMatrix<T>) -> TropicalMagnitude<T> {
    let p = principal_solutions(z);
    let top = |v: &[T]| v.iter().copied().fold(T::neg_infinity(), T::max);
    let lhs = top(&p.v_hat);
    let rhs = top(&p.w_hat);
    if ext_eq(lhs, rhs, T::comparison_tolerance()) {
        TropicalMagnitude::Value(lhs)
    } else {
        TropicalMagnitude::Undefined { lhs, rhs }
    }
}
