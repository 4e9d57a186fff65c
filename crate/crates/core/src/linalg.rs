//! Dense and iterative linear algebra helpers.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::CellOperator;
use crate::error::{Error, Result};

/// Largest operator dimension handled by dense factorizations.
pub const DENSE_LIMIT: usize = 5000;

/// Relative threshold separating zero from nonzero singular values and eigenvalues.
pub const RANK_TOL: f64 = 1e-8;

pub fn check_dense(n: usize) -> Result<()> {
    if n > DENSE_LIMIT {
        Err(Error::TooLarge { size: n, limit: DENSE_LIMIT })
    } else {
        Ok(())
    }
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sym_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Singular values in descending order, from the eigenvalues `±σ` of the
/// symmetric embedding `[[0, M], [Mᵀ, 0]]`.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let (n, k) = m.shape();
    if n == 0 || k == 0 {
        return Vec::new();
    }
    let (values, _) = sym_eigen(embedding(m));
    let r = n.min(k);
    values.iter().rev().take(r).map(|v| v.max(0.0)).collect()
}

fn embedding(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = m.shape();
    let mut e = DMatrix::zeros(n + k, n + k);
    e.view_mut((0, n), (n, k)).copy_from(m);
    e.view_mut((n, 0), (k, n)).copy_from(&m.transpose());
    e
}

/// Orthonormal basis of the column space, dropping singular values below
/// `rel_tol · σ_max`.
pub fn column_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 || m.amax() == 0.0 {
        return DMatrix::zeros(n, 0);
    }
    // the eigenvector of `σ > 0` in the embedding is `(u, v)/√2`
    let (values, vectors) = sym_eigen(embedding(m));
    let smax = values[values.len() - 1];
    let keep: Vec<usize> = (0..values.len()).rev().filter(|&i| values[i] > rel_tol * smax).collect();
    let raw = DMatrix::from_fn(n, keep.len(), |r, c| vectors[(r, keep[c])] * core::f64::consts::SQRT_2);
    let q = raw.qr().q();
    q.columns(0, keep.len()).into_owned()
}

/// Smallest eigenvalue of `MᵀM` with its unit eigenvector, a right singular pair for `σ_min`.
pub fn smallest_right_singular(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (values, vectors) = sym_eigen(m.transpose() * m);
    (libm::sqrt(values[0].max(0.0)), vectors.column(0).into_owned())
}

pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    column_basis(m, rel_tol).ncols()
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `q` inside `ℝ^n`.
pub fn complement_basis(q: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    let proj = DMatrix::identity(n, n) - q * q.transpose();
    let (values, vectors) = sym_eigen(proj);
    let keep: Vec<usize> = (0..n).filter(|&i| values[i] > 0.5).collect();
    DMatrix::from_fn(n, keep.len(), |r, c| vectors[(r, keep[c])])
}

/// `W_r^{1/2} M W_c^{−1/2}`, turning a weighted-self-adjoint operator symmetric.
pub fn whiten(op: &CellOperator, row_weights: &[f64], col_weights: &[f64]) -> DMatrix<f64> {
    let mut m = op.to_dense();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            m[(i, j)] *= libm::sqrt(row_weights[i] / col_weights[j]);
        }
    }
    m
}

/// Extremal eigenvalues `(min, max)` of a symmetric operator by Lanczos
/// iteration with full reorthogonalization.
pub fn lanczos_extremes(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>, steps: usize, seed: u64) -> (f64, f64) {
    let steps = steps.min(n).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
    v /= v.norm();
    let mut basis: Vec<DVector<f64>> = vec![v];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for i in 0..steps {
        let mut w = DVector::from_vec(apply(basis[i].as_slice()));
        let a = w.dot(&basis[i]);
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = w.dot(q);
                w.axpy(-c, q, 1.0);
            }
        }
        let b = w.norm();
        if i + 1 == steps || b < 1e-12 {
            break;
        }
        beta.push(b);
        basis.push(w / b);
    }
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    });
    let (values, _) = sym_eigen(t);
    (values[0], values[m - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_basis_of_weighted_boundary() {
        let d2 = DMatrix::from_row_slice(
            4,
            6,
            &[
                1., -1., 0., 1., 0., 0., 1., 0., -1., 0., 1., 0., 0., 1., -1., 0., 0., 1., 0., 0., 0., 1., -1., 1.,
            ],
        );
        let w = [2.0, 1.5, 1.0, 1.75, 1.25, 2.0f64];
        let mut m = d2.transpose();
        for (i, v) in w.iter().enumerate() {
            m.row_mut(i).scale_mut(1.0 / libm::sqrt(*v));
        }
        let q = column_basis(&m, RANK_TOL);
        assert_eq!(q.ncols(), 3);
        assert!((&q.transpose() * &q - DMatrix::identity(3, 3)).amax() < 1e-12);
        assert!((&m - &q * (q.transpose() * &m)).amax() < 1e-12);
        let s = singular_values(&m);
        let gram = sym_eigen(m.transpose() * &m).0;
        assert!((s[0] - libm::sqrt(gram[3])).abs() < 1e-12);
        assert!(s[3] < 1e-12);
    }

    #[test]
    fn eigen_is_sorted() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (v, vec) = sym_eigen(m.clone());
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 3.0).abs() < 1e-12);
        let r = &m * vec.column(0) - vec.column(0) * v[0];
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn rank_and_complement() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 0.0, 0.0]);
        assert_eq!(rank(&m, RANK_TOL), 1);
        let q = column_basis(&m, RANK_TOL);
        let c = complement_basis(&q, 3);
        assert_eq!(c.ncols(), 2);
        assert!((q.transpose() * &c).amax() < 1e-12);
    }

    #[test]
    fn lanczos_finds_extremes() {
        let n = 60;
        let diag: Vec<f64> = (0..n).map(|i| i as f64 * 0.5 - 3.0).collect();
        let (lo, hi) = lanczos_extremes(n, |x| x.iter().zip(&diag).map(|(a, b)| a * b).collect(), 60, 1);
        assert!((lo + 3.0).abs() < 1e-8 && (hi - 26.5).abs() < 1e-8);
    }
}
