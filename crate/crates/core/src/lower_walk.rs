//! The lower walk on top cells: exact kernels, the normalized `B_p` process and the
//! homology test through the limit kernel.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::chain::{coboundary, down_adjacency, transition_down};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::hodge::betti;
use crate::kernels::HeatKernelSeries;
use crate::linalg::{check_dense, column_basis, sym_eigen, RANK_TOL};

/// `ℰ_n^↓ = (I − (1−p)Δ_d^−)^n` on canonical `d`-cells, `n = 0..=N`.
pub fn exact_lower_kernel(x: &SimplicialComplex, p: f64, horizon: usize) -> Result<HeatKernelSeries> {
    let t = transition_down(x, p)?;
    check_dense(t.nrows())?;
    let t = t.to_dense();
    let m = t.nrows();
    let mut matrices = alloc::vec![DMatrix::identity(m, m)];
    for n in 1..=horizon {
        let next = &t * &matrices[n - 1];
        matrices.push(next);
    }
    Ok(HeatKernelSeries { p, matrices })
}

/// Largest `(d−1)`-degree `M`.
pub fn max_lower_degree(x: &SimplicialComplex) -> usize {
    x.max_degree(x.dim() as i32 - 1)
}

/// `p′ = p/((1−p)(M−2)+1)`.
pub fn lower_laziness(p: f64, m: usize) -> f64 {
    p / ((1.0 - p) * (m as f64 - 2.0) + 1.0)
}

/// `Δ̃_d^− = (d+1)I − Adj`, the unnormalized lower Laplacian with the signed down-adjacency.
pub fn unnormalized_lower_laplacian(x: &SimplicialComplex) -> Result<DMatrix<f64>> {
    let d = x.dim() as i32;
    let delta = coboundary(x, d)?.to_dense();
    check_dense(delta.nrows())?;
    Ok(&delta * delta.transpose())
}

/// `B_p = ((p(M−2)+1)/(M−1)) I − ((1−p)/((M−1)(d+1))) Δ̃_d^−`.
pub fn b_operator(x: &SimplicialComplex, p: f64) -> Result<DMatrix<f64>> {
    let m = max_lower_degree(x);
    if m < 2 {
        return Err(Error::LowerDegree(m));
    }
    let mm = m as f64;
    let d = x.dim() as f64;
    let lap = unnormalized_lower_laplacian(x)?;
    let n = lap.nrows();
    Ok(DMatrix::identity(n, n) * ((p * (mm - 2.0) + 1.0) / (mm - 1.0)) - lap * ((1.0 - p) / ((mm - 1.0) * (d + 1.0))))
}

/// The normalized process `𝓔̃_n = (c B_{p′})^n` with `c = (1−p)(M−2)+1`.
pub fn normalized_b_process(x: &SimplicialComplex, p: f64, horizon: usize) -> Result<HeatKernelSeries> {
    let m = max_lower_degree(x);
    let pp = lower_laziness(p, m);
    let c = (1.0 - p) * (m as f64 - 2.0) + 1.0;
    let b = b_operator(x, pp)? * c;
    let k = b.nrows();
    let mut matrices = alloc::vec![DMatrix::identity(k, k)];
    for n in 1..=horizon {
        let next = &b * &matrices[n - 1];
        matrices.push(next);
    }
    Ok(HeatKernelSeries { p: pp, matrices })
}

/// `max_{n ≤ N} ‖ℰ_n^{↓,p} − 𝓔̃_n^{↓,p′}‖_∞`.
pub fn lower_equivalence_check(x: &SimplicialComplex, p: f64, horizon: usize) -> Result<f64> {
    let a = exact_lower_kernel(x, p, horizon)?;
    let b = normalized_b_process(x, p, horizon)?;
    Ok(a.matrices.iter().zip(&b.matrices).map(|(u, v)| (u - v).amax()).fold(0.0, f64::max))
}

/// One-step check `ℰ_{n+1}^↓ = (I − (1−p)Δ_d^−) ℰ_n^↓` against the signed adjacency form
/// `pI + ((1−p)/(d+1)) Adj`.
pub fn adjacency_form_gap(x: &SimplicialComplex, p: f64) -> Result<f64> {
    let t = transition_down(x, p)?.to_dense();
    let d = x.dim() as f64;
    let n = t.nrows();
    let adj = down_adjacency(x).to_dense();
    let alt = DMatrix::identity(n, n) * p + adj * ((1.0 - p) / (d + 1.0));
    Ok((t - alt).amax())
}

/// Eigenvalues of `I − (1−p)Δ_d^−`, ascending.
pub fn lower_spectrum(x: &SimplicialComplex, p: f64) -> Result<Vec<f64>> {
    let t = transition_down(x, p)?;
    check_dense(t.nrows())?;
    Ok(sym_eigen(t.to_dense()).0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowerHomologyReport {
    /// `ℰ_∞^↓`, the projection onto the eigenvalue-1 space.
    pub limit: DMatrix<f64>,
    /// Every row of the limit lies in `B^d = im δ_d`.
    pub rows_in_coboundaries: bool,
    pub betti_d: usize,
    /// `rows_in_coboundaries` agrees with `H_d = 0`.
    pub consistent: bool,
}

/// Computes `ℰ_∞^↓` and checks that its rows are coboundaries exactly when `H_d(X) = 0`.
pub fn lower_homology_check(x: &SimplicialComplex, p: f64) -> Result<LowerHomologyReport> {
    let t = transition_down(x, p)?;
    check_dense(t.nrows())?;
    let (values, vectors) = sym_eigen(t.to_dense());
    let tol = 1e-9;
    if values.iter().any(|&v| v <= -1.0 + tol || v > 1.0 + tol) {
        return Err(Error::InvalidLaziness(p));
    }
    let n = values.len();
    let keep: Vec<usize> = (0..n).filter(|&i| (values[i] - 1.0).abs() <= tol).collect();
    let v = DMatrix::from_fn(n, keep.len(), |r, c| vectors[(r, keep[c])]);
    let limit = &v * v.transpose();
    let d = x.dim() as i32;
    let delta = coboundary(x, d)?.to_dense();
    let basis = column_basis(&delta, RANK_TOL);
    let residual = &limit.transpose() - &basis * (basis.transpose() * limit.transpose());
    let rows_in_coboundaries = n == 0 || residual.amax() <= 1e-8;
    let betti_d = betti(x, d)?;
    Ok(LowerHomologyReport { limit, rows_in_coboundaries, betti_d, consistent: rows_in_coboundaries == (betti_d == 0) })
}

/// Decay of `‖ℰ_n^↓ − ℰ_∞^↓‖_∞` against the rate `max |1 − (1−p)λ|` over nonzero `λ ∈ Spec Δ_d^−`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerRateReport {
    pub rate_bound: f64,
    pub distances: Vec<f64>,
    pub max_ratio: f64,
}

pub fn lower_convergence_rate(x: &SimplicialComplex, p: f64, horizon: usize) -> Result<LowerRateReport> {
    let report = lower_homology_check(x, p)?;
    let values = lower_spectrum(x, p)?;
    let rate_bound = values.iter().filter(|v| (*v - 1.0).abs() > 1e-9).map(|v| v.abs()).fold(0.0, f64::max);
    let kernel = exact_lower_kernel(x, p, horizon)?;
    let distances: Vec<f64> = kernel.matrices.iter().map(|e| (e - &report.limit).amax()).collect();
    let max_ratio = distances
        .iter()
        .enumerate()
        .map(|(n, &dn)| {
            if dn <= 1e-13 {
                0.0
            } else {
                dn / libm::pow(rate_bound, n as f64)
            }
        })
        .fold(0.0, f64::max);
    Ok(LowerRateReport { rate_bound, distances, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{hollow_tetrahedron, single_triangle, two_triangles};

    #[test]
    fn triangle_kernel_is_power_of_p() {
        let k = exact_lower_kernel(&single_triangle(), 0.3, 5).unwrap();
        for n in 0..=5 {
            assert!((k.matrices[n][(0, 0)] - libm::pow(0.3, n as f64)).abs() < 1e-15);
        }
    }

    #[test]
    fn equivalence_and_adjacency() {
        let x = two_triangles();
        assert_eq!(max_lower_degree(&x), 2);
        assert!(lower_equivalence_check(&x, 0.4, 10).unwrap() < 1e-12);
        assert!(adjacency_form_gap(&x, 0.4).unwrap() < 1e-15);
        assert_eq!(lower_equivalence_check(&single_triangle(), 0.4, 3), Err(Error::LowerDegree(1)));
    }

    #[test]
    fn homology() {
        let r = lower_homology_check(&hollow_tetrahedron(), 0.6).unwrap();
        assert_eq!(r.betti_d, 1);
        assert!(!r.rows_in_coboundaries && r.consistent);
        let r = lower_homology_check(&single_triangle(), 0.6).unwrap();
        assert!(r.rows_in_coboundaries && r.consistent);
    }

    #[test]
    fn rate() {
        let r = lower_convergence_rate(&hollow_tetrahedron(), 0.7, 30).unwrap();
        assert!(r.rate_bound < 1.0);
        assert!(r.max_ratio < 10.0);
    }
}
