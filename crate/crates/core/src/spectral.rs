//! Spectral radius, topological entropy, exact characteristic and zeta
//! polynomials, and Katz centrality.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::{strongly_connected_components, Digraph};
use crate::linalg::{residual, solve, Matrix};
use crate::Scalar;

/// Largest graph accepted by the exact polynomial routines unless the caller
/// raises the cap.
pub const DEFAULT_EXACT_CAP: usize = 64;

const MAX_POWER_ITERATIONS: usize = 200_000;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("power iteration did not certify the spectral radius: bracket [{lower}, {upper}]")]
    NotCertified { lower: f64, upper: f64 },
    #[error(
        "{n} vertices exceeds the exact-arithmetic cap of {cap}; use the numeric spectral radius"
    )]
    TooLarge { n: usize, cap: usize },
    #[error("Katz series diverges: alpha {alpha} >= 1/rho with rho {rho}")]
    KatzDivergent { alpha: f64, rho: f64 },
    #[error("Katz attenuation must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("Katz linear solve failed (residual {0})")]
    KatzSolve(f64),
}

/// Topological entropy in nats; `-inf` exactly when the adjacency matrix is
/// nilpotent.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyValue<T>(pub T);

impl<T: Scalar> EntropyValue<T> {
    pub fn value(self) -> T {
        self.0
    }

    pub fn is_neg_infinite(self) -> bool {
        self.0 == T::neg_infinity()
    }
}

impl<T: Scalar> fmt::Display for EntropyValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_neg_infinite() {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl<T: Scalar> Serialize for EntropyValue<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_neg_infinite() {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0.as_f64())
        }
    }
}

/// Spectral radius of the adjacency matrix.
///
/// Acyclic digraphs (nilpotent adjacency) return exactly zero. Otherwise
/// each nontrivial strong component is handled separately: power iteration
/// on `A + I` (primitive for an irreducible block) until the Collatz–Wielandt
/// ratios bracket the Perron root to `T::spectral_tolerance()`.
pub fn spectral_radius<T: Scalar>(d: &Digraph) -> Result<T, SpectralError> {
    let mut rho = T::zero();
    for comp in strongly_connected_components(d) {
        if comp.len() == 1 && !d.has_edge(comp[0], comp[0]) {
            continue;
        }
        rho = rho.max(component_radius::<T>(d, &comp)?);
    }
    check_row_sum_bounds(d, rho);
    Ok(rho)
}

fn component_radius<T: Scalar>(d: &Digraph, comp: &[usize]) -> Result<T, SpectralError> {
    let k = comp.len();
    let local: std::collections::HashMap<usize, usize> =
        comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let succ: Vec<Vec<usize>> = comp
        .iter()
        .map(|&v| {
            d.successors(v)
                .iter()
                .filter_map(|w| local.get(w).copied())
                .collect()
        })
        .collect();
    let tol = T::spectral_tolerance();
    let mut x = vec![T::one(); k];
    let mut y = vec![T::zero(); k];
    let (mut lo, mut hi) = (T::zero(), T::infinity());
    for _ in 0..MAX_POWER_ITERATIONS {
        // y = (A + I) x
        for i in 0..k {
            y[i] = x[i] + succ[i].iter().map(|&j| x[j]).sum::<T>();
        }
        lo = T::infinity();
        hi = T::zero();
        let mut ymax = T::zero();
        for i in 0..k {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
            ymax = ymax.max(y[i]);
        }
        if hi - lo <= tol {
            return Ok((lo + hi) / T::of(2.0) - T::one());
        }
        for i in 0..k {
            x[i] = y[i] / ymax;
        }
    }
    Err(SpectralError::NotCertified {
        lower: (lo - T::one()).as_f64(),
        upper: (hi - T::one()).as_f64(),
    })
}

fn check_row_sum_bounds<T: Scalar>(d: &Digraph, rho: T) {
    let n = d.vertex_count();
    if n == 0 {
        return;
    }
    let degs = (0..n).map(|v| d.out_degree(v));
    let (min, max) = degs.fold((usize::MAX, 0), |(a, b), x| (a.min(x), b.max(x)));
    let slack = T::spectral_tolerance() * T::of(10.0);
    assert!(
        T::of(min as f64) - slack <= rho && rho <= T::of(max as f64) + slack,
        "spectral radius {rho} outside row-sum bounds [{min}, {max}]"
    );
}

/// `log` of the spectral radius, with `log 0 = -inf`.
pub fn topological_entropy<T: Scalar>(d: &Digraph) -> Result<EntropyValue<T>, SpectralError> {
    let rho = spectral_radius::<T>(d)?;
    Ok(EntropyValue(if rho == T::zero() {
        T::neg_infinity()
    } else {
        rho.ln()
    }))
}

/// Polynomial with exact integer coefficients, ascending degree. Trailing
/// zero coefficients are trimmed; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation in floating point.
    pub fn eval<T: Scalar>(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| {
            acc * x + T::of(c.to_f64().unwrap_or(f64::NAN))
        })
    }

    /// Coefficients reversed within a degree-`n` frame:
    /// `t^n p(1/t)`.
    pub fn reversed(&self, n: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(n + 1, BigInt::zero());
        c.reverse();
        Self::new(c)
    }

    /// Integer array, with any coefficient outside `i64` written as a
    /// decimal string.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|c| match c.to_i64() {
                    Some(v) => serde_json::Value::from(v),
                    None => serde_json::Value::String(c.to_string()),
                })
                .collect(),
        )
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return IntPolynomial::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                _ => write!(f, "{mag}")?,
            }
            match k {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// `det(xI - A)` by the Faddeev–LeVerrier recurrence over big integers.
pub fn char_poly(d: &Digraph) -> Result<IntPolynomial, SpectralError> {
    char_poly_with_cap(d, DEFAULT_EXACT_CAP)
}

pub fn char_poly_with_cap(d: &Digraph, cap: usize) -> Result<IntPolynomial, SpectralError> {
    let n = d.vertex_count();
    if n > cap {
        return Err(SpectralError::TooLarge { n, cap });
    }
    // c[k] is the coefficient of x^k; M_1 = I, then
    //   P = A M_k, c_{n-k} = -tr(P)/k, M_{k+1} = P + c_{n-k} I.
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    for k in 1..=n {
        let mut p: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
        for (i, row) in p.iter_mut().enumerate() {
            for &j in d.successors(i) {
                for (dst, src) in row.iter_mut().zip(&m[j]) {
                    if !src.is_zero() {
                        *dst += src;
                    }
                }
            }
        }
        let trace: BigInt = (0..n).map(|i| &p[i][i]).sum();
        let kk = BigInt::from(k);
        let coeff = -(&trace / &kk);
        assert!(
            (&trace % &kk).is_zero(),
            "Faddeev–LeVerrier division not exact"
        );
        for (i, row) in p.iter_mut().enumerate() {
            row[i] += &coeff;
        }
        c[n - k] = coeff;
        m = p;
    }
    Ok(IntPolynomial::new(c))
}

/// `det(I - tA)`, the reciprocal of the digraph zeta function. Constant term
/// is 1.
pub fn zeta_denominator(d: &Digraph) -> Result<IntPolynomial, SpectralError> {
    zeta_denominator_with_cap(d, DEFAULT_EXACT_CAP)
}

pub fn zeta_denominator_with_cap(d: &Digraph, cap: usize) -> Result<IntPolynomial, SpectralError> {
    Ok(char_poly_with_cap(d, cap)?.reversed(d.vertex_count()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KatzDirection {
    /// Attenuated count of walks ending at each vertex.
    In,
    /// Attenuated count of walks starting at each vertex.
    Out,
}

/// Katz centrality `sum_{l>=1} alpha^l (column sums of A^l)` for `In`; the
/// `Out` direction is `In` on the reversed digraph.
pub fn katz_centrality<T: Scalar>(
    d: &Digraph,
    alpha: T,
    direction: KatzDirection,
) -> Result<Vec<T>, SpectralError> {
    match direction {
        KatzDirection::In => katz_in(d, alpha),
        KatzDirection::Out => katz_in(&d.reverse(), alpha),
    }
}

fn katz_in<T: Scalar>(d: &Digraph, alpha: T) -> Result<Vec<T>, SpectralError> {
    if !(alpha > T::zero()) {
        return Err(SpectralError::InvalidAlpha(alpha.as_f64()));
    }
    let rho = spectral_radius::<T>(d)?;
    if rho > T::zero() && alpha * rho >= T::one() {
        return Err(SpectralError::KatzDivergent {
            alpha: alpha.as_f64(),
            rho: rho.as_f64(),
        });
    }
    let n = d.vertex_count();
    // x = alpha A^T (1 + x)  <=>  (I - alpha A^T) x = alpha A^T 1
    let mut m = Matrix::<T>::identity(n);
    let mut b = vec![T::zero(); n];
    for (u, v) in d.edges() {
        m[(v, u)] = m[(v, u)] - alpha;
        b[v] = b[v] + alpha;
    }
    let mut x = solve(&m, &b).ok_or(SpectralError::KatzSolve(f64::INFINITY))?;
    let tol = T::spectral_tolerance();
    for _ in 0..3 {
        let r: Vec<T> = m
            .mul_vec(&x)
            .iter()
            .zip(&b)
            .map(|(&mx, &bi)| bi - mx)
            .collect();
        if r.iter().all(|ri| ri.abs() <= tol) {
            break;
        }
        if let Some(dx) = solve(&m, &r) {
            for (xi, di) in x.iter_mut().zip(dx) {
                *xi = *xi + di;
            }
        }
    }
    let res = residual(&m, &x, &b);
    if res > tol {
        return Err(SpectralError::KatzSolve(res.as_f64()));
    }
    Ok(x)
}
