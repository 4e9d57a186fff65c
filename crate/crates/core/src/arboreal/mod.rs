//! Arboreal complexes: truncations, first-visit series and the closed forms.

mod measure;

pub use measure::{
    atom_mass, closed_form_g, closed_form_u, density, moments_from_stieltjes, radius_of_convergence, singularities,
    stieltjes, support_interval, taylor_coefficients, ArborealMeasure, QUAD_TOL,
};

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::chain::transition_up;
use crate::complex::{Cell, OrientedIndex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::kernels::{first_visit_columns, return_kernel_diagonal};

/// Default cap on the number of cells of a truncation.
pub const DEFAULT_MAX_CELLS: usize = 4_000_000;

/// A ball of the arboreal complex `T_{d,k}` around `σ_0 = [0, …, d−1]`.
///
/// `layer[i]` is the distance of the `i`-th `(d−1)`-cell from `σ_0` in the
/// tree of `(d−1)`-cells and `d`-cells; cells in layers below `radius` have
/// degree `k` and cells in layer `radius` have degree 1.
#[derive(Clone, Debug)]
pub struct ArborealTruncation {
    pub complex: SimplicialComplex,
    pub layer: Vec<u32>,
    pub sigma0: OrientedIndex,
    /// First up-neighbor of `σ_0`, oriented as a neighbor.
    pub sigma1: Option<OrientedIndex>,
    /// First up-neighbor of `σ_1` in layer 2, oriented as a neighbor.
    pub sigma2: Option<OrientedIndex>,
    pub d: usize,
    pub k: usize,
    pub radius: usize,
}

/// Radius that makes `ℰ_n(σ_0, σ_0)` and `ℱ_n(σ_1, σ_0)` exact for `n ≤ order`.
///
/// Each step moves at most one layer, so rows of layer `r` only matter when
/// `2r ≤ n + 1`.
pub fn locality_radius(order: usize) -> usize {
    order.div_ceil(2) + 1
}

fn top_cell_count(d: usize, k: usize, radius: usize) -> usize {
    let mut total = k;
    let mut frontier = k.saturating_mul(d);
    for _ in 1..radius {
        total = total.saturating_add(frontier.saturating_mul(k - 1));
        frontier = frontier.saturating_mul(k - 1).saturating_mul(d);
    }
    total
}

/// Builds the truncation of `T_{d,k}` at the given radius.
pub fn build_truncated_t(d: usize, k: usize, radius: usize) -> Result<ArborealTruncation> {
    build_truncated_t_bounded(d, k, radius, DEFAULT_MAX_CELLS)
}

pub fn build_truncated_t_bounded(d: usize, k: usize, radius: usize, max_cells: usize) -> Result<ArborealTruncation> {
    if d == 0 || k == 0 || radius == 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "need d, k, radius ≥ 1, got d = {d}, k = {k}, radius = {radius}"
        )));
    }
    let estimate = top_cell_count(d, k, radius).saturating_mul(1usize << (d + 1).min(40));
    if estimate > max_cells {
        return Err(Error::TruncationTooLarge(estimate));
    }
    let root: Vec<u32> = (0..d as u32).collect();
    let mut layers: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    layers.insert(root.clone(), 0);
    let mut faces: Vec<Vec<u32>> = Vec::new();
    let mut next = d as u32;
    let mut frontier = vec![(root.clone(), k)];
    for r in 0..radius {
        let mut new_frontier = Vec::new();
        for (cell, need) in frontier {
            for _ in 0..need {
                let mut tau = cell.clone();
                tau.push(next);
                next += 1;
                for i in 0..d {
                    let mut f = tau.clone();
                    f.remove(i);
                    layers.insert(f.clone(), r as u32 + 1);
                    if r + 1 < radius {
                        new_frontier.push((f, k - 1));
                    }
                }
                faces.push(tau);
            }
        }
        frontier = new_frontier;
    }
    let complex = SimplicialComplex::from_faces(&faces)?;
    let j = d as i32 - 1;
    let layer: Vec<u32> = complex.cells(j).iter().map(|c| layers[c.vertices()]).collect();
    let sigma0 = OrientedIndex::positive(complex.require_index(&Cell::new(root)?)?);
    let sigma1 = complex.up_neighbor_indices(j, sigma0.index).into_iter().find(|o| layer[o.index] == 1);
    let sigma2 = sigma1.and_then(|s1| {
        complex
            .up_neighbor_indices(j, s1.index)
            .into_iter()
            .find(|o| layer[o.index] == 2)
            .map(|o| OrientedIndex::new(o.index, o.sign * s1.sign))
    });
    Ok(ArborealTruncation { complex, layer, sigma0, sigma1, sigma2, d, k, radius })
}

/// `ℰ_n(σ_0, σ_0)` for `n ≤ order` on a truncation that is exact to that order.
pub fn truncated_return_series(d: usize, k: usize, p: f64, order: usize) -> Result<Vec<f64>> {
    let t = build_truncated_t(d, k, locality_radius(order))?;
    let s = transition_up(&t.complex, p)?;
    Ok(return_kernel_diagonal(&s, t.sigma0.index, order))
}

/// `ℱ_n(σ_1, σ_0)` for `n ≤ order`: coefficients of `L_p(z)` on the truncation.
pub fn truncated_u_series(d: usize, k: usize, p: f64, order: usize) -> Result<Vec<f64>> {
    let t = build_truncated_t(d, k, locality_radius(order).max(2))?;
    let s = transition_up(&t.complex, p)?;
    let s1 = t.sigma1.ok_or(Error::InvalidParameter("no neighbor of σ_0".into()))?;
    let cols = first_visit_columns(&s, t.sigma0.index, order);
    Ok(cols.iter().map(|c| f64::from(s1.sign) * c[s1.index]).collect())
}

/// Coefficients of `L_p` from its functional equation
/// `L = pzL + (1−p)(z/k − ((d−1)/k) z L + ((k−1)d/k) z L²)`.
pub fn solve_u_series(d: usize, k: usize, p: f64, order: usize) -> Vec<f64> {
    let (dd, kk) = (d as f64, k as f64);
    let mut u = vec![0.0; order + 1];
    for n in 1..=order {
        let conv: f64 = (0..n).map(|i| u[i] * u[n - 1 - i]).sum();
        let first = if n == 1 { 1.0 / kk } else { 0.0 };
        u[n] = p * u[n - 1] + (1.0 - p) * (first - (dd - 1.0) / kk * u[n - 1] + (kk - 1.0) * dd / kk * conv);
    }
    u
}

/// Largest coefficient of the functional equation residual of `u` up to its length.
pub fn functional_equation_residual(d: usize, k: usize, p: f64, u: &[f64]) -> f64 {
    let (dd, kk) = (d as f64, k as f64);
    (0..u.len())
        .map(|n| {
            let prev = if n > 0 { u[n - 1] } else { 0.0 };
            let conv: f64 = if n > 0 { (0..n).map(|i| u[i] * u[n - 1 - i]).sum() } else { 0.0 };
            let first = if n == 1 { 1.0 / kk } else { 0.0 };
            let rhs = p * prev + (1.0 - p) * (first - (dd - 1.0) / kk * prev + (kk - 1.0) * dd / kk * conv);
            (u[n] - rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// `𝔉_p = pz + (1−p) d z L_p`.
pub fn f_from_u(d: usize, p: f64, u: &[f64]) -> Vec<f64> {
    let mut f = vec![0.0; u.len()];
    for n in 1..u.len() {
        f[n] = (1.0 - p) * d as f64 * u[n - 1];
    }
    if f.len() > 1 {
        f[1] += p;
    }
    f
}

/// Coefficients of `1/(1 − F)` for `F(0) = 0`.
pub fn g_from_f(f: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; f.len()];
    if g.is_empty() {
        return g;
    }
    g[0] = 1.0;
    for n in 1..f.len() {
        g[n] = (1..=n).map(|m| f[m] * g[n - m]).sum();
    }
    g
}

/// `ℰ_n(σ_0, σ_0)` at laziness `p` from the functional equation; no truncation needed.
pub fn series_return_kernel(d: usize, k: usize, p: f64, order: usize) -> Vec<f64> {
    g_from_f(&f_from_u(d, p, &solve_u_series(d, k, p, order)))
}

/// Coefficients of `𝒢` at laziness 0 from the closed form by the Cauchy formula.
pub fn closed_form_coefficients(d: usize, k: usize, order: usize) -> Vec<f64> {
    let r = 0.5 * radius_of_convergence(d, k);
    taylor_coefficients(|z| closed_form_g(z, d, k), r, order)
}

/// `|ℰ_{n+2}/ℰ_n|^{−1/2}` from the series route, an estimate of the radius of convergence.
pub fn radius_estimate(d: usize, k: usize, n: usize) -> f64 {
    let e = series_return_kernel(d, k, 0.0, n + 2);
    libm::sqrt((e[n] / e[n + 2]).abs())
}

/// Comparison of kernel diagonals with the moments of `μ_{d,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    /// `(n, ℰ_n(σ_0,σ_0), ∫ xⁿ dμ)`.
    pub rows: Vec<(usize, f64, f64)>,
    pub max_error: f64,
}

/// Compares `ℰ_n(σ_0,σ_0)` at laziness 0 on a truncation with the measure moments.
pub fn verify_moments(d: usize, k: usize, order: usize) -> Result<MomentReport> {
    let kernel = truncated_return_series(d, k, 0.0, order)?;
    let measure = ArborealMeasure::new(d, k)?;
    let mut rows = Vec::with_capacity(order + 1);
    let mut max_error: f64 = 0.0;
    for (n, &e) in kernel.iter().enumerate() {
        let m = measure.moment(n)?;
        max_error = max_error.max((e - m).abs());
        rows.push((n, e, m));
    }
    Ok(MomentReport { rows, max_error })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recurrence {
    Recurrent,
    Transient,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub class: Recurrence,
    pub atom_at_one: f64,
    /// `∫ dμ/(1−x)` when finite.
    pub integral: Option<f64>,
}

/// Recurrence of the branching walk on `T_{d,k}`: recurrent iff `∫ dμ/(1−x)` diverges.
pub fn classify(d: usize, k: usize) -> Result<Classification> {
    let m = ArborealMeasure::new(d, k)?;
    let atom = m.atom_at_one();
    if atom > 0.0 {
        return Ok(Classification { class: Recurrence::Recurrent, atom_at_one: atom, integral: None });
    }
    let (_, b) = m.support.ok_or(Error::Quadrature)?;
    if b >= 1.0 - 1e-12 {
        return Ok(Classification { class: Recurrence::Recurrent, atom_at_one: 0.0, integral: None });
    }
    let cont = m.integrate_density(|_, omx| 1.0 / omx, QUAD_TOL)?;
    let atoms: f64 = m.atoms.iter().map(|&(x, w)| w / (1.0 - x)).sum();
    Ok(Classification { class: Recurrence::Transient, atom_at_one: 0.0, integral: Some(cont + atoms) })
}

/// `∫_{x ≤ 1−ε} ρ(x)/(1−x) dx` for each `ε`.
pub fn truncated_resolvent_integral(d: usize, k: usize, eps: &[f64]) -> Result<Vec<f64>> {
    let m = ArborealMeasure::new(d, k)?;
    eps.iter().map(|&e| m.integrate_density_cut(|_, omx| 1.0 / omx, e, QUAD_TOL)).collect()
}

/// `μ({1})` estimated from `Re(−iε𝒮(1+iε))` with Richardson extrapolation in `ε`.
pub fn atom_mass_numeric(d: usize, k: usize) -> Result<f64> {
    let mut table: Vec<f64> = Vec::new();
    for j in 0..5 {
        let eps = libm::pow(10.0, -2.0 - j as f64);
        let s = stieltjes(Complex64::new(1.0, eps), d, k)?;
        table.push((Complex64::new(0.0, -eps) * s).re);
    }
    let mut factor = 10.0;
    while table.len() > 1 {
        table = table.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 10.0;
    }
    Ok(table[0])
}
