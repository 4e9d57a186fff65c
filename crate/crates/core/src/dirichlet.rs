//! The Dirichlet problem for `Δ⁺` on `(d−1)`-forms with boundary data on `A ⊊ X^{d−1}`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::chain::{coboundary, upper_laplacian, Form};
use crate::complex::{OrientedIndex, SimplicialComplex, WeightFunction};
use crate::error::{Error, Result};
use crate::linalg::{check_dense, singular_values, smallest_right_singular, sym_eigen};

/// Relative singular value threshold below which `Δ⁺_{X∖A}` counts as singular.
pub const INVERTIBILITY_TOL: f64 = 1e-8;

/// Boundary data `f` on `A`, stored on canonically oriented cells.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    /// Sorted canonical indices of the `(d−1)`-cells in `A`.
    pub cells: Vec<usize>,
    /// `values[i] = f(+cells[i])`.
    pub values: Vec<f64>,
}

impl BoundaryData {
    /// Builds the data from oriented values; cells of `a` absent from `values` get 0.
    pub fn new(x: &SimplicialComplex, a: &[usize], values: &[(OrientedIndex, f64)]) -> Result<Self> {
        let set = boundary_set(x, a)?;
        let cells: Vec<usize> = set.into_iter().collect();
        let mut vals = vec![0.0; cells.len()];
        for &(o, v) in values {
            let pos = cells
                .binary_search(&o.index)
                .map_err(|_| Error::InvalidParameter(alloc::format!("cell {} is not in A", o.index)))?;
            vals[pos] = f64::from(o.sign) * v;
        }
        Ok(BoundaryData { cells, values: vals })
    }
}

fn boundary_set(x: &SimplicialComplex, a: &[usize]) -> Result<BTreeSet<usize>> {
    if x.dim() == 0 {
        return Err(Error::DimensionOutOfRange { got: 0, lo: 1, hi: i64::MAX });
    }
    let n = x.num_cells(x.dim() as i32 - 1);
    let set: BTreeSet<usize> = a.iter().copied().collect();
    if set.is_empty() || set.len() >= n {
        return Err(Error::InvalidBoundary);
    }
    if set.iter().any(|&i| i >= n) {
        return Err(Error::InvalidBoundary);
    }
    Ok(set)
}

/// Block decomposition of `Δ⁺` (weight `w↑`) along `A` and its complement.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedLaplacian {
    /// Canonical indices of `X^{d−1} ∖ A`.
    pub interior: Vec<usize>,
    /// Canonical indices of `A`.
    pub boundary: Vec<usize>,
    /// `Δ⁺_{X∖A}`.
    pub block: DMatrix<f64>,
    /// `Q = −Δ⁺` restricted to rows in `X∖A` and columns in `A`.
    pub coupling: DMatrix<f64>,
    /// Degrees of the interior cells.
    pub degrees: Vec<f64>,
}

pub fn restrict(x: &SimplicialComplex, a: &[usize]) -> Result<RestrictedLaplacian> {
    let set = boundary_set(x, a)?;
    let j = x.dim() as i32 - 1;
    let n = x.num_cells(j);
    check_dense(n)?;
    let w = WeightFunction::up(x)?;
    let lap = upper_laplacian(x, j, &w)?.to_dense();
    let boundary: Vec<usize> = set.iter().copied().collect();
    let interior: Vec<usize> = (0..n).filter(|i| !set.contains(i)).collect();
    let block = DMatrix::from_fn(interior.len(), interior.len(), |r, c| lap[(interior[r], interior[c])]);
    let coupling = DMatrix::from_fn(interior.len(), boundary.len(), |r, c| -lap[(interior[r], boundary[c])]);
    let degrees = interior.iter().map(|&i| x.degree(j, i) as f64).collect();
    Ok(RestrictedLaplacian { interior, boundary, block, coupling, degrees })
}

impl RestrictedLaplacian {
    /// `W^{1/2} Δ⁺_{X∖A} W^{−1/2}`, symmetric and similar to the block.
    pub fn symmetrized(&self) -> DMatrix<f64> {
        let n = self.interior.len();
        DMatrix::from_fn(n, n, |r, c| {
            libm::sqrt(self.degrees[r]) * self.block[(r, c)] / libm::sqrt(self.degrees[c])
        })
    }

    /// Eigenvalues of `Δ⁺_{X∖A}`, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        sym_eigen(self.symmetrized()).0
    }

    fn extend(&self, x: &SimplicialComplex, v: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; x.num_cells(x.dim() as i32 - 1)];
        for (r, &i) in self.interior.iter().enumerate() {
            full[i] = v[r];
        }
        full
    }
}

/// Invertibility of `Δ⁺_{X∖A}` with a kernel witness when singular.
#[derive(Clone, Debug, PartialEq)]
pub struct InvertibilityReport {
    pub invertible: bool,
    pub smallest_singular: f64,
    pub largest_singular: f64,
    /// Zero extension to `X^{d−1}` of a kernel vector, when singular.
    pub witness: Option<Vec<f64>>,
    /// `‖δ_d f̃‖` of the witness; it vanishes exactly when the witness is a cocycle.
    pub witness_coboundary_norm: Option<f64>,
}

pub fn is_invertible(x: &SimplicialComplex, a: &[usize]) -> Result<InvertibilityReport> {
    let r = restrict(x, a)?;
    diagnose(x, &r)
}

fn diagnose(x: &SimplicialComplex, r: &RestrictedLaplacian) -> Result<InvertibilityReport> {
    let s = singular_values(&r.block);
    let lo = s.last().copied().unwrap_or(0.0);
    let hi = s.first().copied().unwrap_or(0.0);
    let invertible = lo > INVERTIBILITY_TOL * hi;
    if invertible {
        return Ok(InvertibilityReport {
            invertible,
            smallest_singular: lo,
            largest_singular: hi,
            witness: None,
            witness_coboundary_norm: None,
        });
    }
    let (_, kernel) = smallest_right_singular(&r.block);
    let v: Vec<f64> = kernel.iter().copied().collect();
    let full = r.extend(x, &v);
    let delta = coboundary(x, x.dim() as i32)?;
    let dv = delta.apply(&full);
    let norm = libm::sqrt(dv.iter().map(|t| t * t).sum::<f64>());
    Ok(InvertibilityReport {
        invertible,
        smallest_singular: lo,
        largest_singular: hi,
        witness: Some(full),
        witness_coboundary_norm: Some(norm),
    })
}

/// Greedy closure: add every cell that is the last missing face of some coface.
/// Returns whether the closure reaches `X^{d−1}` and the cells added at each step.
pub fn check_exhaustive(x: &SimplicialComplex, a: &[usize]) -> Result<(bool, Vec<Vec<usize>>)> {
    let mut current = boundary_set(x, a)?;
    let j = x.dim() as i32 - 1;
    let n = x.num_cells(j);
    let mut steps = Vec::new();
    loop {
        let mut added = Vec::new();
        for s in 0..n {
            if current.contains(&s) {
                continue;
            }
            let completes = x.cofaces_of(j, s).iter().any(|&t| {
                x.faces_of(j + 1, t as usize).iter().all(|&f| f as usize == s || current.contains(&(f as usize)))
            });
            if completes {
                added.push(s);
            }
        }
        if added.is_empty() {
            break;
        }
        current.extend(added.iter().copied());
        steps.push(added);
    }
    Ok((current.len() == n, steps))
}

/// A `(d−2)`-cell whose cofaces all avoid `A`; its coboundary lies in the kernel of `Δ⁺_{X∖A}`.
pub fn open_hinge(x: &SimplicialComplex, a: &[usize]) -> Result<Option<usize>> {
    let set = boundary_set(x, a)?;
    let d = x.dim() as i32;
    if d < 2 {
        return Err(Error::DimensionOutOfRange { got: i64::from(d), lo: 2, hi: i64::MAX });
    }
    Ok((0..x.num_cells(d - 2)).find(|&r| x.cofaces_of(d - 2, r).iter().all(|&s| !set.contains(&(s as usize)))))
}

pub fn check_open_hinge(x: &SimplicialComplex, a: &[usize]) -> Result<bool> {
    Ok(open_hinge(x, a)?.is_some())
}

/// For graphs: `A` meets every connected component.
pub fn meets_every_component(x: &SimplicialComplex, a: &[usize]) -> Result<bool> {
    let set = boundary_set(x, a)?;
    let comps = x.k_components(0)?;
    let mut hit = vec![false; comps.num_unoriented];
    for &i in &set {
        hit[comps.unoriented[i]] = true;
    }
    Ok(hit.into_iter().all(|h| h))
}

/// `𝒢_A^p(σ,σ′) = Σ_n E_A^σ[D_n(σ′)]` on canonical cells of `X∖A`.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenFunction {
    pub p: f64,
    pub interior: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

impl GreenFunction {
    pub fn get(&self, sigma: usize, sigma2: usize) -> Option<f64> {
        let r = self.interior.binary_search(&sigma).ok()?;
        let c = self.interior.binary_search(&sigma2).ok()?;
        Some(self.matrix[(r, c)])
    }
}

fn check_dirichlet_laziness(x: &SimplicialComplex, p: f64) -> Result<()> {
    let d = x.dim() as f64;
    let lo = (d - 1.0) / (d + 1.0);
    if !(p > lo && p < 1.0) {
        return Err(Error::InvalidLaziness(p));
    }
    Ok(())
}

/// `𝒢_A^p = ((1−p) Δ⁺_{X∖A})^{−1}`, the sum of the absorbed transition powers.
pub fn green_function(x: &SimplicialComplex, a: &[usize], p: f64) -> Result<GreenFunction> {
    check_dirichlet_laziness(x, p)?;
    let r = restrict(x, a)?;
    let report = diagnose(x, &r)?;
    if !report.invertible {
        return Err(Error::NotInvertible(report.smallest_singular));
    }
    let inv = r.block.clone().try_inverse().ok_or(Error::NotInvertible(report.smallest_singular))?;
    Ok(GreenFunction { p, interior: r.interior, matrix: inv / (1.0 - p) })
}

/// Partial sums of `Σ_n (𝒜_p^{X∖A})ⁿ` until the increment drops below `tol`.
pub fn green_neumann(x: &SimplicialComplex, a: &[usize], p: f64, tol: f64, max_terms: usize) -> Result<DMatrix<f64>> {
    check_dirichlet_laziness(x, p)?;
    let r = restrict(x, a)?;
    let n = r.interior.len();
    let step = DMatrix::identity(n, n) - &r.block * (1.0 - p);
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for _ in 0..max_terms {
        term = &term * &step;
        sum += &term;
        if term.amax() < tol {
            return Ok(sum);
        }
    }
    Err(Error::NotInvertible(term.amax()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum DirichletSolution {
    Solved(Form),
    /// `Δ⁺_{X∖A}` is singular; the report carries a kernel witness.
    Degenerate(InvertibilityReport),
}

impl DirichletSolution {
    pub fn form(&self) -> Option<&Form> {
        match self {
            DirichletSolution::Solved(f) => Some(f),
            DirichletSolution::Degenerate(_) => None,
        }
    }
}

fn assemble(x: &SimplicialComplex, r: &RestrictedLaplacian, bd: &BoundaryData, interior: &DVector<f64>) -> Form {
    let mut f = Form::zeros(x, x.dim() as i32 - 1);
    for (i, &c) in bd.cells.iter().enumerate() {
        f.values[c] = bd.values[i];
    }
    for (i, &c) in r.interior.iter().enumerate() {
        f.values[c] = interior[i];
    }
    f
}

/// `F = f` on `A` and `F = (1−p) 𝒢_A^p Q f` on `X∖A`.
pub fn solve_dirichlet(x: &SimplicialComplex, bd: &BoundaryData, p: f64) -> Result<DirichletSolution> {
    check_dirichlet_laziness(x, p)?;
    let r = restrict(x, &bd.cells)?;
    let report = diagnose(x, &r)?;
    if !report.invertible {
        return Ok(DirichletSolution::Degenerate(report));
    }
    let g = green_function(x, &bd.cells, p)?;
    let fa = DVector::from_column_slice(&bd.values);
    let interior = (&g.matrix * (&r.coupling * fa)) * (1.0 - p);
    Ok(DirichletSolution::Solved(assemble(x, &r, bd, &interior)))
}

/// `F|_{X∖A} = (Δ⁺_{X∖A})^{−1} Q f` by a linear solve.
pub fn solve_direct(x: &SimplicialComplex, bd: &BoundaryData) -> Result<DirichletSolution> {
    let r = restrict(x, &bd.cells)?;
    let report = diagnose(x, &r)?;
    if !report.invertible {
        return Ok(DirichletSolution::Degenerate(report));
    }
    let rhs = &r.coupling * DVector::from_column_slice(&bd.values);
    let interior = r.block.clone().lu().solve(&rhs).ok_or(Error::NotInvertible(report.smallest_singular))?;
    Ok(DirichletSolution::Solved(assemble(x, &r, bd, &interior)))
}

/// `max |Δ⁺F(σ)|` over `σ ∉ A`.
pub fn dirichlet_residual(x: &SimplicialComplex, a: &[usize], f: &Form) -> Result<f64> {
    let set = boundary_set(x, a)?;
    let j = x.dim() as i32 - 1;
    let lap = upper_laplacian(x, j, &WeightFunction::up(x)?)?;
    let v = lap.apply(&f.values);
    Ok((0..v.len()).filter(|i| !set.contains(i)).map(|i| v[i].abs()).fold(0.0, f64::max))
}

/// `|⟨Δ⁺_{X∖A} g, g⟩_w − ‖δ_d g̃‖²|` for `g` on `X∖A` and its zero extension `g̃`.
pub fn energy_identity_gap(x: &SimplicialComplex, a: &[usize], g: &[f64]) -> Result<f64> {
    let r = restrict(x, a)?;
    if g.len() != r.interior.len() {
        return Err(Error::Length { got: g.len(), expected: r.interior.len() });
    }
    let lg = &r.block * DVector::from_column_slice(g);
    let lhs: f64 = (0..g.len()).map(|i| r.degrees[i] * lg[i] * g[i]).sum();
    let dv = coboundary(x, x.dim() as i32)?.apply(&r.extend(x, g));
    let rhs: f64 = dv.iter().map(|t| t * t).sum();
    Ok((lhs - rhs).abs())
}
