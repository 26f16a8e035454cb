//! Small dense linear algebra: partial-pivot elimination with a singularity
//! test, and minimum-norm least squares through a one-sided Jacobi SVD.

use crate::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Max-norm of `a x - b`.
pub fn residual<T: Scalar>(a: &Matrix<T>, x: &[T], b: &[T]) -> T {
    a.mul_vec(x)
        .iter()
        .zip(b)
        .fold(T::zero(), |m, (&ax, &bi)| m.max((ax - bi).abs()))
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when some pivot falls below
/// `T::pivot_tolerance()` times the largest entry of `a`.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "solve needs a square matrix");
    assert_eq!(n, b.len());
    if n == 0 {
        return Some(Vec::new());
    }
    let scale = a.max_abs();
    if scale == T::zero() {
        return None;
    }
    let threshold = scale * T::pivot_tolerance();
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (piv, piv_abs) =
            (col..n)
                .map(|r| (r, m[(r, col)].abs()))
                .fold(
                    (col, T::zero()),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if piv_abs <= threshold {
            return None;
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(piv * n + j, col * n + j);
            }
            rhs.swap(piv, col);
        }
        let p = m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] / p;
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] = m[(r, j)] - f * v;
            }
            rhs[r] = rhs[r] - f * rhs[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let s: T = (i + 1..n).map(|j| m[(i, j)] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[(i, i)];
    }
    Some(x)
}

/// Thin SVD `a = u diag(sigma) v^T` by one-sided Jacobi rotations.
pub struct Svd<T> {
    /// Left singular vectors scaled by sigma (unnormalised), one per column.
    us: Vec<Vec<T>>,
    /// Right singular vectors, one per column.
    v: Vec<Vec<T>>,
    pub sigma: Vec<T>,
}

fn rotate<T: Scalar>(x: &mut [T], y: &mut [T], c: T, s: T) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

fn pair_mut<T>(cols: &mut [Vec<T>], p: usize, q: usize) -> (&mut [T], &mut [T]) {
    let (lo, hi) = cols.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

pub fn svd<T: Scalar>(a: &Matrix<T>) -> Svd<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut u: Vec<Vec<T>> = (0..n)
        .map(|j| (0..m).map(|i| a[(i, j)]).collect())
        .collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    let eps = T::epsilon();
    let dot = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&a, &b)| a * b).sum::<T>();
    let frob: T = u.iter().map(|c| dot(c, c)).sum();
    // Columns this small are numerically zero; rotating them only churns.
    let negligible = frob * eps * eps;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (up, uq) = pair_mut(&mut u, p, q);
                let alpha = dot(up, up);
                let beta = dot(uq, uq);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(up, uq);
                if gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::of(2.0) * gamma);
                let sign = if zeta >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(up, uq, c, s);
                let (vp, vq) = pair_mut(&mut v, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = u.iter().map(|c| dot(c, c).sqrt()).collect();
    Svd { us: u, v, sigma }
}

impl<T: Scalar> Svd<T> {
    /// Pseudo-inverse applied to `b`, discarding singular values below
    /// `rel_cutoff * max(sigma)`.
    pub fn solve_min_norm(&self, b: &[T], rel_cutoff: T) -> Vec<T> {
        let smax = self.sigma.iter().fold(T::zero(), |a, &s| a.max(s));
        let n = self.v.len();
        let mut x = vec![T::zero(); n];
        if smax == T::zero() {
            return x;
        }
        for (j, &s) in self.sigma.iter().enumerate() {
            if s <= rel_cutoff * smax {
                continue;
            }
            // u_j . b / s, with u_j = us_j / s
            let proj: T = self.us[j].iter().zip(b).map(|(&a, &bi)| a * bi).sum::<T>() / (s * s);
            for (xi, &vij) in x.iter_mut().zip(&self.v[j]) {
                *xi = *xi + proj * vij;
            }
        }
        x
    }

    pub fn rank(&self, rel_cutoff: T) -> usize {
        let smax = self.sigma.iter().fold(T::zero(), |a, &s| a.max(s));
        self.sigma
            .iter()
            .filter(|&&s| s > rel_cutoff * smax)
            .count()
    }
}

/// Minimum-norm least-squares solution of `a x = b`.
pub fn min_norm_least_squares<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Vec<T> {
    svd(a).solve_min_norm(b, T::pivot_tolerance())
}
