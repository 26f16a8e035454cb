//! Magnitude of a digraph viewed as a Lawvere metric space under hop
//! distance: similarity matrices `exp(-t d)`, (co)weightings and magnitude
//! functions.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{shortest_path_matrix, Digraph, DistanceMatrix};
use crate::linalg::{min_norm_least_squares, residual, solve, Matrix};
use crate::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("scale must be nonnegative, got {0}")]
    NegativeScale(f64),
}

/// `Z[j][k] = exp(-t d[j][k])`, with unreachable pairs mapped to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<T> {
    pub z: Matrix<T>,
    pub t: T,
}

pub fn similarity_matrix<T: Scalar>(
    d: &DistanceMatrix,
    t: T,
) -> Result<SimilarityMatrix<T>, MetricError> {
    if t.is_nan() || t < T::zero() {
        return Err(MetricError::NegativeScale(t.as_f64()));
    }
    let n = d.size();
    let z = Matrix::from_fn(n, n, |j, k| match d.get(j, k) {
        None => T::zero(),
        Some(0) => T::one(),
        // t = inf gives exp(-inf) = 0 for every positive distance.
        Some(h) => (-t * T::of(h as f64)).exp(),
    });
    Ok(SimilarityMatrix { z, t })
}

/// Which system a (co)weighting solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// Weighting: `Z w = 1`.
    Row,
    /// Coweighting: `Z^T v = 1`.
    Column,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    ExactSolve,
    LeastSquares,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::ExactSolve => "exact-solve",
            SolveMethod::LeastSquares => "least-squares",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightingResult<T> {
    pub w: Vec<T>,
    /// Max-norm of `Zw - 1` (or `Z^T w - 1`).
    pub residual: T,
    pub method: SolveMethod,
    /// Sum of the components of `w`.
    pub magnitude: T,
}

/// Solves for a weighting (`Side::Row`) or coweighting (`Side::Column`).
/// Singular systems fall back to the minimum-norm least-squares solution;
/// the method and residual are reported either way.
pub fn weighting<T: Scalar>(z: &SimilarityMatrix<T>, side: Side) -> WeightingResult<T> {
    let a = match side {
        Side::Row => z.z.clone(),
        Side::Column => z.z.transpose(),
    };
    let ones = vec![T::one(); a.rows()];
    let (w, method) = match solve(&a, &ones) {
        Some(w) => (w, SolveMethod::ExactSolve),
        None => (min_norm_least_squares(&a, &ones), SolveMethod::LeastSquares),
    };
    let residual = residual(&a, &w, &ones);
    let magnitude = w.iter().copied().sum();
    WeightingResult {
        w,
        residual,
        method,
        magnitude,
    }
}

/// One sample of a magnitude function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MagnitudePoint<T> {
    pub t: T,
    pub weighting: WeightingResult<T>,
    pub coweighting: WeightingResult<T>,
}

impl<T: Scalar> MagnitudePoint<T> {
    /// Weighting sum; this is the reported magnitude.
    pub fn magnitude(&self) -> T {
        self.weighting.magnitude
    }

    /// Whether both sides were solved exactly with small residual, in which
    /// case their sums must agree.
    pub fn both_exact(&self) -> bool {
        let tol = T::comparison_tolerance();
        self.weighting.method == SolveMethod::ExactSolve
            && self.coweighting.method == SolveMethod::ExactSolve
            && self.weighting.residual < tol
            && self.coweighting.residual < tol
    }
}

/// Magnitude at each scale in `ts`. The distance matrix is computed once;
/// scales are solved in parallel.
pub fn magnitude_function<T: Scalar>(
    d: &Digraph,
    ts: &[T],
) -> Result<Vec<MagnitudePoint<T>>, MetricError> {
    let dist = shortest_path_matrix(d);
    ts.par_iter()
        .map(|&t| {
            let z = similarity_matrix(&dist, t)?;
            Ok(MagnitudePoint {
                t,
                weighting: weighting(&z, Side::Row),
                coweighting: weighting(&z, Side::Column),
            })
        })
        .collect()
}

/// Magnitude at a single scale.
pub fn magnitude<T: Scalar>(d: &Digraph, t: T) -> Result<T, MetricError> {
    let z = similarity_matrix(&shortest_path_matrix(d), t)?;
    Ok(weighting(&z, Side::Row).magnitude)
}
