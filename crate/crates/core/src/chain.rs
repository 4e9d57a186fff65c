//! Forms, coboundary and boundary operators, weighted Laplacians and the
//! transition operators of the walks, as matrices over canonical cell bases.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::complex::{alternating, OrientedCell, OrientedIndex, SimplicialComplex, WeightFunction};
use crate::error::{Error, Result};

/// Sparse matrix between two cochain spaces (compressed rows).
#[derive(Clone, Debug, PartialEq)]
pub struct CellOperator {
    /// Dimension of the cells indexing the columns.
    pub domain: i32,
    /// Dimension of the cells indexing the rows.
    pub codomain: i32,
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl CellOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets(
        domain: i32,
        codomain: i32,
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        t.sort_unstable_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut rows: Vec<usize> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of bounds");
            if rows.last() == Some(&r) && cols.last() == Some(&(c as u32)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c as u32);
                vals.push(v);
            }
        }
        let mut kept_cols = Vec::with_capacity(cols.len());
        let mut kept_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != 0.0 {
                row_ptr[r + 1] += 1;
                kept_cols.push(c);
                kept_vals.push(v);
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        CellOperator { domain, codomain, nrows, ncols, row_ptr, cols: kept_cols, vals: kept_vals }
    }

    pub fn identity(dim: i32, n: usize) -> Self {
        Self::from_triplets(dim, dim, n, n, (0..n).map(|i| (i, i, 1.0)))
    }

    pub fn zero(domain: i32, codomain: i32, nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(domain, codomain, nrows, ncols, core::iter::empty())
    }

    pub fn from_dense(domain: i32, codomain: i32, m: &DMatrix<f64>) -> Self {
        let trip = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j, m[(i, j)])));
        Self::from_triplets(domain, codomain, m.nrows(), m.ncols(), trip)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzero entries of row `i` as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().map(|&c| c as usize).zip(self.vals[r].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn apply_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows);
        let mut out = vec![0.0; self.ncols];
        for (i, j, v) in self.triplets() {
            out[j] += v * y[i];
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.codomain,
            self.domain,
            self.ncols,
            self.nrows,
            self.triplets().map(|(i, j, v)| (j, i, v)),
        )
    }

    /// The product `self ∘ rhs`.
    pub fn compose(&self, rhs: &CellOperator) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "inner dimensions differ");
        let mut trip = Vec::new();
        let mut acc = vec![0.0; rhs.ncols];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in rhs.row(k) {
                    if acc[j] == 0.0 {
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &touched {
                trip.push((i, j, acc[j]));
                acc[j] = 0.0;
            }
            touched.clear();
        }
        Self::from_triplets(rhs.domain, self.codomain, self.nrows, rhs.ncols, trip)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &CellOperator, b: f64) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let trip = self
            .triplets()
            .map(|(i, j, v)| (i, j, a * v))
            .chain(other.triplets().map(|(i, j, v)| (i, j, b * v)));
        Self::from_triplets(self.domain, self.codomain, self.nrows, self.ncols, trip)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &CellOperator) -> f64 {
        (self.to_dense() - other.to_dense()).amax()
    }
}

/// A `k`-form, stored by its values on canonically oriented `k`-cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    pub k: i32,
    pub values: Vec<f64>,
}

impl Form {
    pub fn zeros(x: &SimplicialComplex, k: i32) -> Self {
        Form { k, values: vec![0.0; x.num_cells(k)] }
    }

    pub fn new(x: &SimplicialComplex, k: i32, values: Vec<f64>) -> Result<Self> {
        let n = x.num_cells(k);
        if values.len() != n {
            return Err(Error::Length { got: values.len(), expected: n });
        }
        Ok(Form { k, values })
    }

    /// The indicator `𝟙_σ` of an oriented cell: `±1` on `σ`, zero elsewhere.
    pub fn dirac(x: &SimplicialComplex, k: i32, o: OrientedIndex) -> Self {
        let mut f = Self::zeros(x, k);
        f.values[o.index] = f64::from(o.sign);
        f
    }

    pub fn eval(&self, o: OrientedIndex) -> f64 {
        f64::from(o.sign) * self.values[o.index]
    }

    pub fn eval_cell(&self, x: &SimplicialComplex, c: &OrientedCell) -> Result<f64> {
        if c.dim() != self.k {
            return Err(Error::FormDimension { got: c.dim(), expected: self.k });
        }
        Ok(self.eval(x.oriented_index(c)?))
    }

    pub fn apply(&self, op: &CellOperator) -> Result<Form> {
        if op.domain != self.k || op.ncols() != self.values.len() {
            return Err(Error::FormDimension { got: self.k, expected: op.domain });
        }
        Ok(Form { k: op.codomain, values: op.apply(&self.values) })
    }
}

/// `Σ_σ w(σ) f(σ) g(σ)` over canonical `k`-cells.
pub fn inner_product(f: &Form, g: &Form, w: &WeightFunction) -> Result<f64> {
    if f.k != g.k {
        return Err(Error::FormDimension { got: g.k, expected: f.k });
    }
    let wk = w.level(f.k);
    if wk.len() != f.values.len() || wk.len() != g.values.len() {
        return Err(Error::Length { got: f.values.len(), expected: wk.len() });
    }
    Ok(wk.iter().zip(&f.values).zip(&g.values).map(|((w, a), b)| w * a * b).sum())
}

fn check_laziness(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidLaziness(p))
    }
}

fn check_dim(k: i32, lo: i32, hi: i32) -> Result<()> {
    if k < lo || k > hi {
        return Err(Error::DimensionOutOfRange { got: k as i64, lo: lo as i64, hi: hi as i64 });
    }
    Ok(())
}

/// Matrix of `δ_k : Ω^{k−1} → Ω^k`, `0 ≤ k ≤ d+1`; entry `(−1)^i` at `(τ, τ∖τ_i)`.
pub fn coboundary(x: &SimplicialComplex, k: i32) -> Result<CellOperator> {
    let d = x.dim() as i32;
    check_dim(k, 0, d + 1)?;
    let rows = x.num_cells(k);
    let cols = x.num_cells(k - 1);
    if k > d {
        return Ok(CellOperator::zero(k - 1, k, 0, cols));
    }
    let trip = (0..rows).flat_map(|t| {
        x.faces_of(k, t)
            .iter()
            .enumerate()
            .map(move |(i, &s)| (t, s as usize, f64::from(alternating(i))))
    });
    Ok(CellOperator::from_triplets(k - 1, k, rows, cols, trip))
}

/// Matrix of `∂_k = W_{k−1}^{−1} δ_k^T W_k : Ω^k → Ω^{k−1}`.
pub fn boundary(x: &SimplicialComplex, k: i32, w: &WeightFunction) -> Result<CellOperator> {
    let delta = coboundary(x, k)?;
    let trip = delta
        .triplets()
        .map(|(t, s, v)| (s, t, v * w.get(k, t) / w.get(k - 1, s)))
        .collect::<Vec<_>>();
    Ok(CellOperator::from_triplets(k, k - 1, delta.ncols(), delta.nrows(), trip))
}

/// `Δ_k^+ = ∂_{k+1} δ_{k+1}`, `−1 ≤ k ≤ d`.
pub fn upper_laplacian(x: &SimplicialComplex, k: i32, w: &WeightFunction) -> Result<CellOperator> {
    check_dim(k, -1, x.dim() as i32)?;
    Ok(boundary(x, k + 1, w)?.compose(&coboundary(x, k + 1)?))
}

/// `Δ_k^− = δ_k ∂_k`, `0 ≤ k ≤ d`.
pub fn lower_laplacian(x: &SimplicialComplex, k: i32, w: &WeightFunction) -> Result<CellOperator> {
    check_dim(k, 0, x.dim() as i32)?;
    Ok(coboundary(x, k)?.compose(&boundary(x, k, w)?))
}

/// `Δ_k = Δ_k^+ + Δ_k^−`.
pub fn full_laplacian(x: &SimplicialComplex, k: i32, w: &WeightFunction) -> Result<CellOperator> {
    let up = upper_laplacian(x, k, w)?;
    if k < 0 {
        return Ok(up);
    }
    Ok(up.combine(1.0, &lower_laplacian(x, k, w)?, 1.0))
}

/// `Δ_k^+` from its coefficients: diagonal `Σ_{τ⊃σ} w(τ)/w(σ)`, and `−w(τ)/w(σ)`
/// against each neighbor through `τ`, signed by the neighbor orientation.
pub fn upper_laplacian_explicit(x: &SimplicialComplex, k: i32, w: &WeightFunction) -> Result<CellOperator> {
    check_dim(k, -1, x.dim() as i32)?;
    let n = x.num_cells(k);
    let mut trip = Vec::new();
    if k < x.dim() as i32 {
        for s in 0..n {
            let ws = w.get(k, s);
            for &t in x.cofaces_of(k, s) {
                let wt = w.get(k + 1, t as usize);
                trip.push((s, s, wt / ws));
                let fs = x.faces_of(k + 1, t as usize);
                let a = fs.iter().position(|&f| f as usize == s).unwrap();
                for (b, &f) in fs.iter().enumerate() {
                    if b != a {
                        let sign = -f64::from(alternating(a + b));
                        trip.push((s, f as usize, -sign * wt / ws));
                    }
                }
            }
        }
    }
    Ok(CellOperator::from_triplets(k, k, n, n, trip))
}

/// `Δ_k^−` from its coefficients: diagonal `Σ_{σ◁τ} w(τ)/w(σ)`, and `−w(τ′)/w(σ)`
/// against each down-adjacent `τ′` through `σ`, signed by orientation.
pub fn lower_laplacian_explicit(x: &SimplicialComplex, k: i32, w: &WeightFunction) -> Result<CellOperator> {
    check_dim(k, 0, x.dim() as i32)?;
    let n = x.num_cells(k);
    let mut trip = Vec::new();
    for t in 0..n {
        for (a, &s) in x.faces_of(k, t).iter().enumerate() {
            let ws = w.get(k - 1, s as usize);
            trip.push((t, t, w.get(k, t) / ws));
            for &u in x.cofaces_of(k - 1, s as usize) {
                let u = u as usize;
                if u != t {
                    let b = x.face_position(k - 1, s as usize, u);
                    let sign = -f64::from(alternating(a + b));
                    trip.push((t, u, -sign * w.get(k, u) / ws));
                }
            }
        }
    }
    Ok(CellOperator::from_triplets(k, k, n, n, trip))
}

/// Signed up-adjacency on `(d−1)`-cells: `s_{ij}` for each neighbor pair.
pub fn up_adjacency(x: &SimplicialComplex) -> CellOperator {
    let j = x.dim() as i32 - 1;
    let n = x.num_cells(j);
    let trip = (0..n).flat_map(|i| {
        x.up_neighbor_indices(j, i).into_iter().map(move |o| (i, o.index, f64::from(o.sign)))
    });
    CellOperator::from_triplets(j, j, n, n, trip.collect::<Vec<_>>())
}

/// Signed down-adjacency on `d`-cells.
pub fn down_adjacency(x: &SimplicialComplex) -> CellOperator {
    let d = x.dim() as i32;
    let n = x.num_cells(d);
    let trip = (0..n).flat_map(|i| {
        x.down_adjacent_indices(d, i).into_iter().map(move |o| (i, o.index, f64::from(o.sign)))
    });
    CellOperator::from_triplets(d, d, n, n, trip.collect::<Vec<_>>())
}

fn require_walkable(x: &SimplicialComplex) -> Result<()> {
    if x.dim() == 0 {
        return Err(Error::DimensionOutOfRange { got: 0, lo: 1, hi: i64::MAX });
    }
    x.require_positive_degrees()
}

/// `𝒜_p = I − (1−p)Δ⁺` on `Ω^{d−1}` with the weight `w↑`.
pub fn transition_up(x: &SimplicialComplex, p: f64) -> Result<CellOperator> {
    check_laziness(p)?;
    require_walkable(x)?;
    let j = x.dim() as i32 - 1;
    let w = WeightFunction::up(x)?;
    let lap = upper_laplacian(x, j, &w)?;
    Ok(CellOperator::identity(j, x.num_cells(j)).combine(1.0, &lap, -(1.0 - p)))
}

/// The walk operator `A_p f(σ) = p f(σ) + ((1−p)/d) Σ_{σ′∼σ} f(σ′)/deg σ′`.
pub fn transition_walk(x: &SimplicialComplex, p: f64) -> Result<CellOperator> {
    check_laziness(p)?;
    require_walkable(x)?;
    let j = x.dim() as i32 - 1;
    let n = x.num_cells(j);
    let d = x.dim() as f64;
    let trip = (0..n).flat_map(|i| {
        let diag = core::iter::once((i, i, p));
        let off = x.up_neighbor_indices(j, i).into_iter().map(move |o| {
            (i, o.index, (1.0 - p) * f64::from(o.sign) / (d * x.degree(j, o.index) as f64))
        });
        diag.chain(off)
    });
    Ok(CellOperator::from_triplets(j, j, n, n, trip.collect::<Vec<_>>()))
}

/// `I − (1−p)Δ_d^−` on `Ω^d` with the weight `w↓`.
pub fn transition_down(x: &SimplicialComplex, p: f64) -> Result<CellOperator> {
    check_laziness(p)?;
    let d = x.dim() as i32;
    if d == 0 {
        return Err(Error::DimensionOutOfRange { got: 0, lo: 1, hi: i64::MAX });
    }
    let w = WeightFunction::down(x)?;
    let lap = lower_laplacian(x, d, &w)?;
    Ok(CellOperator::identity(d, x.num_cells(d)).combine(1.0, &lap, -(1.0 - p)))
}

/// Result of the goodness test on a weight function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoodnessBound {
    pub delta_bounded: bool,
    pub boundary_well_defined: bool,
    pub sup: f64,
}

/// The supremum controlling `‖δ_k‖` and the convergence of `∂_k`.
pub fn goodness_bound(x: &SimplicialComplex, w: &WeightFunction, k: usize) -> Result<GoodnessBound> {
    let (good, sup) = crate::complex::is_k_good(x, w, k)?;
    Ok(GoodnessBound { delta_bounded: good, boundary_well_defined: good, sup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::complex::Cell;

    fn uniform(x: &SimplicialComplex) -> WeightFunction {
        WeightFunction::uniform(x, 1.0).unwrap()
    }

    #[test]
    fn coboundary_squares_to_zero() {
        for x in [catalog::single_triangle(), catalog::torus7(), catalog::hollow_tetrahedron()] {
            for k in 0..=x.dim() as i32 {
                let dd = coboundary(&x, k + 1).unwrap().compose(&coboundary(&x, k).unwrap());
                assert_eq!(dd.nnz(), 0);
            }
        }
    }

    #[test]
    fn delta_zero_spreads_constant() {
        let x = catalog::single_triangle();
        let f = Form::new(&x, -1, vec![2.5]).unwrap();
        let g = f.apply(&coboundary(&x, 0).unwrap()).unwrap();
        assert_eq!(g.values, vec![2.5; 3]);
    }

    #[test]
    fn triangle_boundary_signs() {
        let x = catalog::single_triangle();
        let f = Form::new(&x, 2, vec![1.0]).unwrap();
        let g = f.apply(&boundary(&x, 2, &uniform(&x)).unwrap()).unwrap();
        // edges in order [0,1], [0,2], [1,2]
        assert_eq!(g.values, vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn isolated_cell_boundary_row_is_zero() {
        let x = crate::complex::build_complex(&[vec![0, 1, 2], vec![3, 4]]).unwrap();
        let b = boundary(&x, 2, &uniform(&x)).unwrap();
        let e = x.index_of(&Cell::new(vec![3, 4]).unwrap()).unwrap();
        assert_eq!(b.row(e).count(), 0);
    }

    #[test]
    fn dirac_forms_are_orthogonal() {
        let x = catalog::single_triangle();
        let w = uniform(&x);
        let a = Form::dirac(&x, 1, OrientedIndex::positive(0));
        let b = Form::dirac(&x, 1, OrientedIndex::new(2, -1));
        assert_eq!(inner_product(&a, &b, &w).unwrap(), 0.0);
        assert_eq!(inner_product(&b, &b, &w).unwrap(), 1.0);
        assert_eq!(b.eval(OrientedIndex::positive(2)), -1.0);
    }

    #[test]
    fn laplacian_formulas_agree() {
        for x in [catalog::single_triangle(), catalog::torus7(), catalog::two_triangles()] {
            for w in [uniform(&x), WeightFunction::up(&x).unwrap(), WeightFunction::down(&x).unwrap()] {
                for k in 0..=x.dim() as i32 {
                    let a = upper_laplacian(&x, k, &w).unwrap();
                    let b = upper_laplacian_explicit(&x, k, &w).unwrap();
                    assert!(a.max_abs_diff(&b) < 1e-12);
                    let a = lower_laplacian(&x, k, &w).unwrap();
                    let b = lower_laplacian_explicit(&x, k, &w).unwrap();
                    assert!(a.max_abs_diff(&b) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn transition_up_triangle_spectrum() {
        let x = catalog::single_triangle();
        let a = transition_up(&x, 0.5).unwrap().to_dense();
        let mut ev: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 0.5).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12 && (ev[2] - 1.0).abs() < 1e-12);
        let id = transition_up(&x, 1.0).unwrap();
        assert_eq!(id, CellOperator::identity(1, 3));
    }

    #[test]
    fn transition_walk_on_triangle_matches_up() {
        let x = catalog::single_triangle();
        // all degrees are 1: A_{p'} = 𝒜_p / c with p' = p/(1+(1−p)(d−1)), c = 1+(1−p)(d−1)
        let p = 0.3;
        let c = 1.0 + (1.0 - p);
        let a = transition_walk(&x, p / c).unwrap().to_dense() * c;
        let s = transition_up(&x, p).unwrap().to_dense();
        assert!((a - s).amax() < 1e-12);
        assert_eq!(transition_walk(&x, 1.0).unwrap(), CellOperator::identity(1, 3));
    }

    #[test]
    fn transition_down_identity_at_one() {
        let x = catalog::two_triangles();
        assert_eq!(transition_down(&x, 1.0).unwrap(), CellOperator::identity(2, 2));
        let t = transition_down(&x, 0.4).unwrap();
        assert!((t.get(0, 0) - 0.4).abs() < 1e-15);
        assert!((t.get(0, 1).abs() - 0.6 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn goodness_examples() {
        let x = catalog::single_triangle();
        let g = goodness_bound(&x, &WeightFunction::up(&x).unwrap(), 2).unwrap();
        assert_eq!(g, GoodnessBound { delta_bounded: true, boundary_well_defined: true, sup: 1.0 });
        let g = goodness_bound(&x, &WeightFunction::down(&x).unwrap(), 2).unwrap();
        assert!((g.sup - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn compose_matches_dense() {
        let x = catalog::torus7();
        let a = coboundary(&x, 2).unwrap();
        let b = coboundary(&x, 1).unwrap();
        let t = a.transpose().compose(&a);
        assert!((t.to_dense() - a.to_dense().transpose() * a.to_dense()).amax() == 0.0);
        assert_eq!(a.compose(&b).nnz(), 0);
    }
}
