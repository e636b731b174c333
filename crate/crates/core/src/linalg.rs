//! Small dense linear algebra: just enough for low-dimensional generators,
//! Hessian checks, and affine least-squares fits. Dimensions here are tiny
//! (rarely above 10), so simple O(n^3) routines are the right tool.

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::LengthMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Matrix::new(r, c, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| dot(self.row(i), x))
            .collect()
    }

    /// Largest absolute deviation from symmetry, `max |a_ij - a_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "symmetry check needs a square matrix");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Cholesky factor L with A = L L^T, or `None` when A is not
    /// positive-definite (within floating point).
    pub fn cholesky(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "cholesky needs a square matrix");
        let n = self.rows;
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return None;
                    }
                    l.set(i, j, s.sqrt());
                } else {
                    l.set(i, j, s / l.get(j, j));
                }
            }
        }
        Some(l)
    }

    /// Solve A x = b given the Cholesky factor of A (forward then back
    /// substitution).
    #[allow(clippy::needless_range_loop)]
    pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
        let n = l.rows;
        assert_eq!(b.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l.get(i, k) * y[k];
            }
            y[i] = s / l.get(i, i);
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l.get(k, i) * x[k];
            }
            x[i] = s / l.get(i, i);
        }
        x
    }

    /// Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi
    /// rotations. Eigenvectors are returned as columns, eigenvalues in the
    /// matching order (not sorted).
    pub fn symmetric_eigen(&self) -> (Vec<f64>, Matrix) {
        assert_eq!(self.rows, self.cols, "eigen needs a square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut v = Matrix::identity(n);
        if n == 1 {
            return (vec![a.get(0, 0)], v);
        }
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a.get(i, j) * a.get(i, j);
                }
            }
            let scale: f64 = (0..n).map(|i| a.get(i, i).abs()).sum::<f64>().max(1e-300);
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        1.0 / (theta - (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        let eigenvalues = (0..n).map(|i| a.get(i, i)).collect();
        (eigenvalues, v)
    }

    /// Smallest eigenvalue of a symmetric matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = self.symmetric_eigen();
        vals.into_iter().fold(f64::INFINITY, f64::min)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(xi, yi)| alpha * xi + yi).collect()
}

pub fn scale(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|xi| alpha * xi).collect()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Minimum-norm least-squares solution of `A x = b` via the eigendecomposition
/// of the (symmetric positive semi-definite) normal matrix `A^T A`.
///
/// Eigendirections with eigenvalue below `rank_cut_rel * lambda_max` are
/// treated as null. Returns the solution together with the effective rank and
/// the condition number `sqrt(lambda_max / lambda_min_retained)` of the
/// retained spectrum.
pub struct LeastSquares {
    pub solution: Vec<f64>,
    pub effective_rank: usize,
    pub condition: f64,
}

#[allow(clippy::needless_range_loop)]
pub fn least_squares_min_norm(a: &Matrix, b: &[f64], rank_cut_rel: f64) -> LeastSquares {
    assert_eq!(a.rows(), b.len(), "least squares dimension mismatch");
    let m = a.rows();
    let n = a.cols();
    let mut ata = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for r in 0..m {
                s += a.get(r, i) * a.get(r, j);
            }
            ata.set(i, j, s);
            ata.set(j, i, s);
        }
    }
    let mut atb = vec![0.0; n];
    for (i, slot) in atb.iter_mut().enumerate() {
        let mut s = 0.0;
        for r in 0..m {
            s += a.get(r, i) * b[r];
        }
        *slot = s;
    }
    let (vals, vecs) = ata.symmetric_eigen();
    let lambda_max = vals.iter().fold(0.0f64, |acc, v| acc.max(*v));
    let cut = rank_cut_rel * lambda_max;
    let mut solution = vec![0.0; n];
    let mut effective_rank = 0;
    let mut lambda_min_retained = f64::INFINITY;
    for (k, &lambda) in vals.iter().enumerate() {
        if lambda <= cut || lambda <= 0.0 {
            continue;
        }
        effective_rank += 1;
        lambda_min_retained = lambda_min_retained.min(lambda);
        let vk: Vec<f64> = (0..n).map(|i| vecs.get(i, k)).collect();
        let coef = dot(&vk, &atb) / lambda;
        for i in 0..n {
            solution[i] += coef * vk[i];
        }
    }
    let condition = if effective_rank == 0 {
        f64::INFINITY
    } else {
        (lambda_max / lambda_min_retained).sqrt()
    };
    LeastSquares {
        solution,
        effective_rank,
        condition,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_identity() {
        let l = Matrix::identity(3).cholesky().unwrap();
        assert_eq!(l, Matrix::identity(3));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = Matrix::new(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(a.cholesky().is_none());
    }

    #[test]
    fn cholesky_solve_roundtrip() {
        let a = Matrix::new(2, 2, vec![4.0, 1.0, 1.0, 3.0]).unwrap();
        let l = a.cholesky().unwrap();
        let x = Matrix::cholesky_solve(&l, &[1.0, 2.0]);
        let back = a.matvec(&x);
        assert!((back[0] - 1.0).abs() < 1e-12);
        assert!((back[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_eigen_diagonal() {
        let a = Matrix::diagonal(&[3.0, 1.0, 2.0]);
        let (mut vals, _) = a.symmetric_eigen();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_eigen_2x2() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let a = Matrix::new(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let (mut vals, _) = a.symmetric_eigen();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_exact_affine() {
        // f(x) = 2x + 1 sampled at four points.
        let a = Matrix::from_rows(&[
            vec![0.0, 1.0],
            vec![1.0, 1.0],
            vec![2.0, 1.0],
            vec![3.0, 1.0],
        ])
        .unwrap();
        let b = vec![1.0, 3.0, 5.0, 7.0];
        let ls = least_squares_min_norm(&a, &b, 1e-12);
        assert_eq!(ls.effective_rank, 2);
        assert!((ls.solution[0] - 2.0).abs() < 1e-10);
        assert!((ls.solution[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn least_squares_detects_rank_deficiency() {
        // Second column is a copy of the first.
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]).unwrap();
        let ls = least_squares_min_norm(&a, &[1.0, 2.0, 3.0], 1e-12);
        assert_eq!(ls.effective_rank, 1);
    }
}
