//! Dense symmetric eigensolver, one-sided Jacobi SVD and pivoted Cholesky.
//!
//! Matrices are small (a few hundred rows at most), so everything here is
//! plain row-major storage and cyclic Jacobi rotations, which keep good
//! relative accuracy for the tiny eigenvalues of smooth kernels.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sum::Neumaier;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(&a, &b)| a * b)
                    .collect::<Neumaier<T>>()
                    .value()
            })
            .collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Eigenvectors stored as rows: `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<T>>,
    pub sweeps: usize,
}

impl<T: Real> SymmetricEigen<T> {
    /// Largest `‖A v - λ v‖∞ / ‖A‖∞` over the first `count` eigenpairs.
    pub fn relative_residual(&self, a: &Matrix<T>, count: usize) -> T {
        let norm = a.norm_inf().max(T::min_positive_value());
        self.values
            .iter()
            .zip(&self.vectors)
            .take(count)
            .map(|(&lam, v)| {
                let av = a.mul_vec(v);
                av.iter()
                    .zip(v)
                    .map(|(&x, &y)| (x - lam * y).abs())
                    .fold(T::zero(), T::max)
                    / norm
            })
            .fold(T::zero(), T::max)
    }
}

/// Cyclic Jacobi eigensolver for a symmetric matrix.
///
/// Rotations are skipped when `|a_pq| <= eps * sqrt(|a_pp a_qq|)`, the
/// relative criterion that preserves small eigenvalues of positive definite
/// matrices.
pub fn jacobi_eigen<T: Real>(a: &Matrix<T>, max_sweeps: usize) -> Result<SymmetricEigen<T>> {
    let n = a.rows();
    if n != a.cols() {
        return Err(Error::InvalidArgument(
            "eigensolver needs a square matrix".into(),
        ));
    }
    let mut m = a.data.clone();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let eps = T::epsilon();
    let tiny = T::min_positive_value();
    let mut sweeps = 0;
    let mut converged = n <= 1;
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                if apq.abs() <= eps * (app * aqq).abs().sqrt() || apq.abs() <= tiny {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = T::zero();
                m[q * n + p] = T::zero();
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "Jacobi eigensolver after {max_sweeps} sweeps"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[j * n + j]
            .partial_cmp(&m[i * n + i])
            .expect("NaN eigenvalue")
    });
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
        .collect();
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Singular values (descending) of a matrix given by its columns, via
/// one-sided (Hestenes) Jacobi orthogonalization. Column norms are updated
/// from the rotation angle within a sweep and recomputed between sweeps.
pub fn singular_values<T: Real>(mut columns: Vec<Vec<T>>, max_sweeps: usize) -> Result<Vec<T>> {
    let m = columns.len();
    let eps = T::epsilon();
    let mut norms: Vec<T> = columns.iter().map(|c| dot(c, c)).collect();
    // Largest columns first speeds up convergence.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).expect("NaN column norm"));
    columns = order
        .iter()
        .map(|&i| std::mem::take(&mut columns[i]))
        .collect();
    norms = order.iter().map(|&i| norms[i]).collect();
    // Orthogonality threshold scaled by the column length, as in LAPACK's
    // one-sided Jacobi; plain eps can cycle on rounding noise.
    let rows = columns.first().map_or(0, |c| c.len());
    let ortho = eps * T::lit((rows as f64).sqrt().max(1.0));
    let mut converged = m <= 1;
    let mut sweeps = 0;
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        let mut rotated = false;
        // Columns below roundoff of the largest one carry no information and
        // can otherwise rotate against each other indefinitely.
        let floor = norms.iter().copied().fold(T::zero(), T::max) * eps * eps;
        for i in 0..m {
            for j in i + 1..m {
                let (alpha, beta) = (norms[i], norms[j]);
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let (lo, hi) = columns.split_at_mut(j);
                let (ci, cj) = (&mut lo[i], &mut hi[0]);
                let gamma = dot(ci, cj);
                if gamma.abs() <= ortho * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = if zeta == T::zero() {
                    T::one()
                } else {
                    zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let (a, b) = (*x, *y);
                    *x = c * a - s * b;
                    *y = s * a + c * b;
                }
                norms[i] = (alpha - t * gamma).max(T::zero());
                norms[j] = beta + t * gamma;
            }
        }
        for (n, c) in norms.iter_mut().zip(&columns) {
            *n = dot(c, c);
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "one-sided Jacobi SVD after {max_sweeps} sweeps"
        )));
    }
    let mut sv: Vec<T> = norms.into_iter().map(|x| x.sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("NaN singular value"));
    Ok(sv)
}

/// Dot product with four interleaved accumulators.
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        for l in 0..4 {
            acc[l] = acc[l] + a[4 * k + l] * b[4 * k + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s = s + a[k] * b[k];
    }
    s
}

/// Low-rank factor `A ≈ L Lᵀ` of a symmetric positive semidefinite matrix.
#[derive(Debug, Clone)]
pub struct PivotedCholesky<T> {
    /// `n × rank`, row-major, rows in the original ordering.
    pub factor: Matrix<T>,
    pub pivots: Vec<usize>,
}

impl<T: Real> PivotedCholesky<T> {
    pub fn rank(&self) -> usize {
        self.factor.cols()
    }
}

/// Diagonally pivoted Cholesky factorization stopping once the largest
/// remaining pivot falls below `tol`. A remaining pivot below `-tol` is an
/// error: the matrix is not positive semidefinite.
pub fn pivoted_cholesky<T: Real>(a: &Matrix<T>, tol: T) -> Result<PivotedCholesky<T>> {
    let n = a.rows();
    let mut diag: Vec<T> = (0..n).map(|i| a.get(i, i)).collect();
    let mut cols: Vec<Vec<T>> = Vec::new();
    let mut pivots = Vec::new();
    let mut used = vec![false; n];
    for _ in 0..n {
        let (p, dp) = (0..n).filter(|&i| !used[i]).map(|i| (i, diag[i])).fold(
            (usize::MAX, T::neg_infinity()),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
        if p == usize::MAX {
            break;
        }
        if dp <= tol {
            if let Some((i, v)) = (0..n)
                .filter(|&i| !used[i])
                .map(|i| (i, diag[i]))
                .find(|x| x.1 < -tol)
            {
                return Err(Error::NegativePivot {
                    index: i,
                    value: v.as_f64(),
                });
            }
            break;
        }
        used[p] = true;
        pivots.push(p);
        let root = dp.sqrt();
        let mut col = vec![T::zero(); n];
        for i in 0..n {
            if used[i] && i != p {
                continue;
            }
            let mut s = Neumaier::new();
            s.add(a.get(i, p));
            for c in &cols {
                s.add(-(c[i] * c[p]));
            }
            col[i] = s.value() / root;
        }
        col[p] = root;
        for i in 0..n {
            if !used[i] {
                diag[i] = diag[i] - col[i] * col[i];
            }
        }
        cols.push(col);
    }
    let rank = cols.len();
    let factor = Matrix::from_fn(n, rank, |i, k| cols[k][i]);
    Ok(PivotedCholesky { factor, pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert(n: usize) -> Matrix<f64> {
        Matrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64)
    }

    #[test]
    fn jacobi_diagonalizes_small_matrix() {
        let a = Matrix::from_fn(3, 3, |i, j| {
            [[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]][i][j]
        });
        let e = jacobi_eigen(&a, 50).unwrap();
        let s2 = 2f64.sqrt();
        let expect = [2.0 + s2, 2.0, 2.0 - s2];
        for (v, x) in e.values.iter().zip(expect) {
            assert!((v - x).abs() < 1e-14);
        }
        assert!(e.relative_residual(&a, 3) < 1e-14);
    }

    #[test]
    fn svd_matches_eigen_of_gram() {
        // Columns of the Hilbert matrix; singular values equal eigenvalues
        // because it is symmetric positive definite.
        let h = hilbert(6);
        let cols: Vec<Vec<f64>> = (0..6)
            .map(|j| (0..6).map(|i| h.get(i, j)).collect())
            .collect();
        let sv = singular_values(cols, 60).unwrap();
        let e = jacobi_eigen(&h, 60).unwrap();
        for (s, l) in sv.iter().zip(&e.values) {
            assert!(((s - l) / l).abs() < 1e-9, "{s} vs {l}");
        }
        // smallest eigenvalue of H_6 is about 1.08e-7
        assert!((sv[5] / 1.082_799_484_565_e-7 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pivoted_cholesky_reconstructs_low_rank() {
        let x = [0.1, 0.4, 0.5, 0.9];
        // rank-2 kernel 1 + xy
        let a = Matrix::from_fn(4, 4, |i, j| 1.0 + x[i] * x[j]);
        let ch = pivoted_cholesky(&a, 1e-12).unwrap();
        assert_eq!(ch.rank(), 2);
        for i in 0..4 {
            for j in 0..4 {
                let v: f64 = (0..2)
                    .map(|k| ch.factor.get(i, k) * ch.factor.get(j, k))
                    .sum();
                assert!((v - a.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pivoted_cholesky_rejects_indefinite() {
        let a = Matrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(matches!(
            pivoted_cholesky(&a, 1e-12),
            Err(Error::NegativePivot { .. })
        ));
    }

    #[test]
    fn jacobi_in_single_precision() {
        let a = Matrix::from_fn(2, 2, |i, j| if i == j { 2.0_f32 } else { 1.0 });
        let e = jacobi_eigen(&a, 30).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-6 && (e.values[1] - 1.0).abs() < 1e-6);
    }
}
