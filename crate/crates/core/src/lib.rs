//! Entropy-based magnitude invariants of digraphs and flow graphs.
//!
//! Numeric routines are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`. Walk counts and characteristic polynomials are
//! exact big integers.

pub mod cover;
pub mod features;
pub mod flow;
pub mod graph;
pub mod linalg;
pub mod metric;
pub mod report;
mod scalar;
pub mod spectral;

pub use scalar::{ext_eq, Scalar};

pub type Matrix = linalg::Matrix<f64>;
pub type EntropyValue = spectral::EntropyValue<f64>;
pub type TropicalMatrix = flow::TropicalMatrix<f64>;
pub type PrincipalSolutions = flow::PrincipalSolutions<f64>;
pub type TropicalMagnitude = flow::TropicalMagnitude<f64>;
pub type SimilarityMatrix = metric::SimilarityMatrix<f64>;
pub type WeightingResult = metric::WeightingResult<f64>;
pub type MagnitudePoint = metric::MagnitudePoint<f64>;
pub type FeatureTable = features::FeatureTable<f64>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Flow(#[from] flow::FlowError),
    #[error(transparent)]
    Cover(#[from] cover::CoverError),
    #[error(transparent)]
    Metric(#[from] metric::MetricError),
    #[error(transparent)]
    Feature(#[from] features::FeatureError),
}

impl Error {
    /// Whether the error concerns reading input (I/O, syntax, schema) rather
    /// than the mathematics of a well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Graph(_) | Error::Feature(features::FeatureError::Source { .. })
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
