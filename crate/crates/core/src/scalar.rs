//! Floating-point scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar type used for spectra, magnitudes and correlations.
///
/// Exact quantities (walk counts, characteristic polynomials) never go
/// through this trait; they use big integers.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Bracket width at which a spectral radius is considered certified.
    fn spectral_tolerance() -> Self;

    /// Relative pivot size below which elimination is treated as singular.
    fn pivot_tolerance() -> Self;

    /// Default tolerance for comparing finite results.
    fn comparison_tolerance() -> Self;

    /// Lossy conversion from `f64`; used for literals.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {
    fn spectral_tolerance() -> Self {
        1e-10
    }
    fn pivot_tolerance() -> Self {
        1e-12
    }
    fn comparison_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn spectral_tolerance() -> Self {
        2e-5
    }
    fn pivot_tolerance() -> Self {
        1e-5
    }
    fn comparison_tolerance() -> Self {
        1e-4
    }
}

/// Equality in extended arithmetic: infinities compare exactly, finite values
/// within `tol`.
pub fn ext_eq<T: Scalar>(a: T, b: T, tol: T) -> bool {
    if a.is_infinite() || b.is_infinite() {
        a == b
    } else {
        (a - b).abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_eq_handles_infinities() {
        assert!(ext_eq(f64::INFINITY, f64::INFINITY, 1e-9));
        assert!(!ext_eq(f64::INFINITY, f64::NEG_INFINITY, 1e-9));
        assert!(!ext_eq(1e300, f64::INFINITY, 1e-9));
        assert!(ext_eq(0.5, 0.5 + 1e-10, 1e-9));
        assert!(ext_eq(0.5f32, 0.50001, 1e-4));
    }
}
