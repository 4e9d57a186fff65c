//! Exact heat kernels of the branching walk, first-visit kernels, generating
//! functions, limit kernels and the diagnostics built on them.
//!
//! Matrices are indexed by canonical `(d−1)`-cells as `E[(σ, σ′)] = ℰ(σ, σ′)`.
//! For fixed `σ′` the column `ℰ_n(·, σ′)` is the form `𝒜_p^n 𝟙_{σ′}`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::chain::{transition_up, transition_walk, CellOperator, Form};
use crate::complex::{OrientedIndex, SimplicialComplex, WeightFunction};
use crate::error::{Error, Result};
use crate::hodge::{betti, spectral_gap, whitened_upper_laplacian, HodgeSpaces};
use crate::linalg::{check_dense, sym_eigen, RANK_TOL};

/// Tolerance for counting an eigenvalue of `Δ^+` as zero.
const KERNEL_TOL: f64 = 1e-9;

fn check_laziness(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidLaziness(p))
    }
}

fn top(x: &SimplicialComplex) -> i32 {
    x.dim() as i32 - 1
}

/// `ℰ_n` for `n = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatKernelSeries {
    pub p: f64,
    pub matrices: Vec<DMatrix<f64>>,
}

impl HeatKernelSeries {
    /// `ℰ_n(σ, σ′)` for oriented arguments.
    pub fn get(&self, n: usize, sigma: OrientedIndex, sigma2: OrientedIndex) -> f64 {
        f64::from(sigma.sign * sigma2.sign) * self.matrices[n][(sigma.index, sigma2.index)]
    }

    pub fn horizon(&self) -> usize {
        self.matrices.len() - 1
    }
}

/// `ℰ_n = 𝒜_p^n` by repeated application of the transition operator.
pub fn exact_heat_kernel(x: &SimplicialComplex, p: f64, horizon: usize) -> Result<HeatKernelSeries> {
    let s = transition_up(x, p)?;
    check_dense(s.nrows())?;
    let s = s.to_dense();
    let mut matrices = Vec::with_capacity(horizon + 1);
    matrices.push(DMatrix::identity(s.nrows(), s.nrows()));
    for n in 1..=horizon {
        let next = &s * &matrices[n - 1];
        matrices.push(next);
    }
    Ok(HeatKernelSeries { p, matrices })
}

/// `ℰ_n` from the first-step recursion
/// `ℰ_n(σ,σ′) = p ℰ_{n−1}(σ,σ′) + ((1−p)/deg σ) Σ_{σ″∼σ} ℰ_{n−1}(σ″,σ′)`.
pub fn heat_kernel_by_recursion(x: &SimplicialComplex, p: f64, horizon: usize) -> Result<HeatKernelSeries> {
    check_laziness(p)?;
    x.require_positive_degrees()?;
    let j = top(x);
    let m = x.num_cells(j);
    check_dense(m)?;
    let nbrs: Vec<Vec<OrientedIndex>> = (0..m).map(|i| x.up_neighbor_indices(j, i)).collect();
    let mut matrices = vec![DMatrix::identity(m, m)];
    for n in 1..=horizon {
        let prev = &matrices[n - 1];
        let mut next = DMatrix::zeros(m, m);
        for s in 0..m {
            let c = (1.0 - p) / x.degree(j, s) as f64;
            for t in 0..m {
                let spread: f64 = nbrs[s].iter().map(|o| f64::from(o.sign) * prev[(o.index, t)]).sum();
                next[(s, t)] = p * prev[(s, t)] + c * spread;
            }
        }
        matrices.push(next);
    }
    Ok(HeatKernelSeries { p, matrices })
}

/// `ℰ_n(σ, σ)` for `n = 0..=N` by sparse iteration of the column `𝒜^n 𝟙_σ`.
pub fn return_kernel_diagonal(s: &CellOperator, sigma: usize, horizon: usize) -> Vec<f64> {
    let mut v = vec![0.0; s.nrows()];
    v[sigma] = 1.0;
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(1.0);
    for _ in 0..horizon {
        v = s.apply(&v);
        out.push(v[sigma]);
    }
    out
}

/// The normalized expectation process of the `(d−1)`-walk at laziness `p′`:
/// `𝓔̃_{n+1} = c · 𝓔̃_n A_{p′}^T` with `c = d/(p′(d−1)+1)`.
pub fn walk_expectation(x: &SimplicialComplex, p_walk: f64, horizon: usize) -> Result<HeatKernelSeries> {
    let a = transition_walk(x, p_walk)?;
    check_dense(a.nrows())?;
    let d = x.dim() as f64;
    let c = d / (p_walk * (d - 1.0) + 1.0);
    let at = a.to_dense().transpose() * c;
    let m = a.nrows();
    let mut matrices = vec![DMatrix::identity(m, m)];
    for n in 1..=horizon {
        let next = &matrices[n - 1] * &at;
        matrices.push(next);
    }
    Ok(HeatKernelSeries { p: p_walk, matrices })
}

/// `p′ = p / (1 + (1−p)(d−1))`.
pub fn walk_laziness(p: f64, d: usize) -> f64 {
    p / (1.0 + (1.0 - p) * (d as f64 - 1.0))
}

/// `ℱ_n(·, σ′)` for one target, `n = 0..=N` (with `ℱ_0 = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct FirstVisitSeries {
    pub p: f64,
    pub target: usize,
    /// `columns[n][σ] = ℱ_n(σ, σ′)` for canonical `σ` and canonical target.
    pub columns: Vec<Vec<f64>>,
}

impl FirstVisitSeries {
    pub fn get(&self, n: usize, sigma: OrientedIndex, target_sign: i8) -> f64 {
        f64::from(sigma.sign * target_sign) * self.columns[n][sigma.index]
    }
}

/// `ℱ_n(·,σ′) = (S P)^{n−1} S 𝟙_{σ′}` where `P` zeroes the target coordinate.
pub fn first_visit_kernel(x: &SimplicialComplex, p: f64, target: usize, horizon: usize) -> Result<FirstVisitSeries> {
    let s = transition_up(x, p)?;
    if target >= s.nrows() {
        return Err(Error::InvalidParameter(alloc::format!("target index {target} out of range")));
    }
    Ok(FirstVisitSeries { p, target, columns: first_visit_columns(&s, target, horizon) })
}

/// The first-visit recursion on an arbitrary one-step expectation operator.
pub fn first_visit_columns(s: &CellOperator, target: usize, horizon: usize) -> Vec<Vec<f64>> {
    let m = s.nrows();
    let mut out = vec![vec![0.0; m]];
    if horizon == 0 {
        return out;
    }
    let mut e = vec![0.0; m];
    e[target] = 1.0;
    let mut v = s.apply(&e);
    out.push(v.clone());
    for _ in 2..=horizon {
        v[target] = 0.0;
        v = s.apply(&v);
        out.push(v.clone());
    }
    out
}

/// One-step expected counts on oriented cells (codes `2i`, `2i+1`):
/// `M(a,b) = p[a=b] + ((1−p)/deg a)[b is an up-neighbor of a]`.
pub fn oriented_step_matrix(x: &SimplicialComplex, p: f64) -> Result<CellOperator> {
    check_laziness(p)?;
    x.require_positive_degrees()?;
    let j = top(x);
    let m = x.num_cells(j);
    let mut trip = Vec::new();
    for i in 0..m {
        let c = (1.0 - p) / x.degree(j, i) as f64;
        for sign in [1i8, -1] {
            let a = OrientedIndex::new(i, sign);
            trip.push((a.code(), a.code(), p));
            for o in x.up_neighbor_indices(j, i) {
                let b = OrientedIndex::new(o.index, o.sign * sign);
                trip.push((a.code(), b.code(), c));
            }
        }
    }
    Ok(CellOperator::from_triplets(j, j, 2 * m, 2 * m, trip))
}

/// `E^σ[K_n(σ′)]`: expected unsigned first visits to the oriented target, `n = 0..=N`.
pub fn expected_first_visits(
    x: &SimplicialComplex,
    p: f64,
    start: OrientedIndex,
    target: OrientedIndex,
    horizon: usize,
) -> Result<Vec<f64>> {
    let m = oriented_step_matrix(x, p)?;
    let mut v = vec![0.0; m.nrows()];
    v[target.code()] = 1.0;
    let mut out = vec![0.0];
    for n in 1..=horizon {
        if n > 1 {
            v[target.code()] = 0.0;
            v[target.flip().code()] = 0.0;
        }
        v = m.apply(&v);
        out.push(v[start.code()]);
    }
    Ok(out)
}

/// Truncated power series `Σ c_n z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    pub coeffs: Vec<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PowerSeries { coeffs }
    }

    /// Product truncated to the shorter length.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n).map(|k| (0..=k).map(|i| self.coeffs[i] * other.coeffs[k - i]).sum()).collect();
        PowerSeries { coeffs }
    }

    /// `1 − self`.
    pub fn one_minus(&self) -> PowerSeries {
        let mut coeffs: Vec<f64> = self.coeffs.iter().map(|c| -c).collect();
        if let Some(c) = coeffs.first_mut() {
            *c += 1.0;
        }
        PowerSeries { coeffs }
    }

    /// Whether `|c_n| ≤ base^n` for every coefficient (up to rounding).
    pub fn bounded_by_powers(&self, base: f64) -> bool {
        self.coeffs.iter().enumerate().all(|(n, c)| c.abs() <= libm::pow(base, n as f64) * (1.0 + 1e-12))
    }
}

/// Return and first-return generating functions of one oriented cell.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingFunctions {
    pub g: PowerSeries,
    pub f: PowerSeries,
}

impl GeneratingFunctions {
    /// `max_n |[(1−𝔉)𝒢]_n − [n = 0]|`.
    pub fn residual(&self) -> f64 {
        let prod = self.f.one_minus().mul(&self.g);
        prod.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| (c - if n == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }
}

/// `𝒢_n = ℰ_n(σ,σ)` and `𝔉_n = ℱ_n(σ,σ)` up to order `N`.
pub fn generating_functions(x: &SimplicialComplex, p: f64, sigma: usize, horizon: usize) -> Result<GeneratingFunctions> {
    let s = transition_up(x, p)?;
    if sigma >= s.nrows() {
        return Err(Error::InvalidParameter(alloc::format!("cell index {sigma} out of range")));
    }
    let g = return_kernel_diagonal(&s, sigma, horizon);
    let f = first_visit_columns(&s, sigma, horizon).iter().map(|c| c[sigma]).collect();
    Ok(GeneratingFunctions { g: PowerSeries::new(g), f: PowerSeries::new(f) })
}

/// Largest violation of `ℰ_n(σ,σ′) = Σ_{k=1}^n ℱ_k(σ,σ′) ℰ_{n−k}(σ′,σ′)` over `σ` and `1 ≤ n ≤ N`.
pub fn convolution_residual(x: &SimplicialComplex, p: f64, target: usize, horizon: usize) -> Result<f64> {
    let e = exact_heat_kernel(x, p, horizon)?;
    let f = first_visit_kernel(x, p, target, horizon)?;
    let mut worst: f64 = 0.0;
    for n in 1..=horizon {
        for s in 0..e.matrices[0].nrows() {
            let conv: f64 = (1..=n).map(|k| f.columns[k][s] * e.matrices[n - k][(target, target)]).sum();
            worst = worst.max((conv - e.matrices[n][(s, target)]).abs());
        }
    }
    Ok(worst)
}

/// Convergence threshold `(d−1)/(d+1)`.
pub fn laziness_threshold(d: usize) -> f64 {
    (d as f64 - 1.0) / (d as f64 + 1.0)
}

fn check_limit_hypothesis(x: &SimplicialComplex, p: f64) -> Result<()> {
    check_laziness(p)?;
    let threshold = laziness_threshold(x.dim());
    if p < threshold {
        return Err(Error::BelowThreshold { p, threshold });
    }
    if p == threshold && x.disorientable_components()?.iter().any(|&b| b) {
        return Err(Error::DisorientableAtThreshold);
    }
    Ok(())
}

/// `ℰ_∞` and the iteration used as a cross-check.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitKernel {
    pub p: f64,
    /// `matrix[(σ,σ′)] = ℰ_∞(σ,σ′)`; columns are the projections `Π_1 𝟙_{σ′}`.
    pub matrix: DMatrix<f64>,
    /// Steps until `‖ℰ_n − ℰ_{n−1}‖_∞ < 1e−10`, if reached within the cap.
    pub iterations: Option<usize>,
    /// `‖ℰ_n − ℰ_∞‖_∞` at the end of the iteration.
    pub iteration_error: f64,
}

/// Iteration cap for the limit cross-check.
pub const LIMIT_ITERATION_CAP: usize = 20_000;

/// `ℰ_∞` by spectral projection onto `ker Δ^+`, the eigenvalue-1 space of `𝒜_p`.
pub fn limit_kernel(x: &SimplicialComplex, p: f64) -> Result<LimitKernel> {
    check_limit_hypothesis(x, p)?;
    let w = WeightFunction::up(x)?;
    let j = top(x);
    let m = x.num_cells(j);
    let lap = whitened_upper_laplacian(x, j, &w)?;
    let scale = lap.amax().max(1.0);
    let (values, vectors) = sym_eigen(lap);
    // at p = 1 the operator is the identity and every eigenvalue equals one
    let keep: Vec<usize> = (0..m).filter(|&i| p == 1.0 || values[i].abs() <= KERNEL_TOL * scale).collect();
    let v = DMatrix::from_fn(m, keep.len(), |r, c| vectors[(r, keep[c])]);
    let proj = &v * v.transpose();
    let sw: Vec<f64> = w.level(j).iter().map(|a| libm::sqrt(*a)).collect();
    let matrix = DMatrix::from_fn(m, m, |r, c| proj[(r, c)] * sw[c] / sw[r]);

    let s = transition_up(x, p)?.to_dense();
    let mut e = DMatrix::identity(m, m);
    let mut iterations = None;
    for n in 1..=LIMIT_ITERATION_CAP {
        let next = &s * &e;
        let change = (&next - &e).amax();
        e = next;
        if change < 1e-10 {
            iterations = Some(n);
            break;
        }
    }
    let iteration_error = (&e - &matrix).amax();
    Ok(LimitKernel { p, matrix, iterations, iteration_error })
}

/// Whitened orthonormal bases of `B^{d−1}` and `Z_{d−1}` under `w↑`.
fn cocycle_split(x: &SimplicialComplex) -> Result<(WeightFunction, HodgeSpaces)> {
    let w = WeightFunction::up(x)?;
    let spaces = HodgeSpaces::new(x, top(x), &w)?;
    Ok((w, spaces))
}

/// `‖Proj_{Z_{d−1}} g‖_w`, the weighted distance from `g` to `B^{d−1}`.
fn distance_to_coboundaries(spaces: &HodgeSpaces, w: &WeightFunction, k: i32, g: Vec<f64>) -> Result<f64> {
    let f = Form { k, values: g };
    let z = spaces.project_cycles(&f)?;
    Ok(libm::sqrt(crate::chain::inner_product(&z, &z, w)?))
}

/// `dim span {Proj_{Z_{d−1}} ℰ_∞(·, σ′)}`, which equals `dim H_{d−1}`.
pub fn homology_dim_from_kernel(x: &SimplicialComplex, p: f64) -> Result<usize> {
    let lim = limit_kernel(x, p)?;
    let (_, spaces) = cocycle_split(x)?;
    let j = top(x);
    let m = lim.matrix.nrows();
    let mut proj = DMatrix::zeros(m, m);
    for c in 0..m {
        let col = Form { k: j, values: lim.matrix.column(c).iter().copied().collect() };
        proj.set_column(c, &DVector::from_vec(spaces.project_cycles(&col)?.values));
    }
    if m == 0 || proj.amax() <= RANK_TOL {
        return Ok(0);
    }
    let sv = crate::linalg::singular_values(&proj);
    Ok(sv.iter().filter(|&&s| s > RANK_TOL).count())
}

/// Outcome of the geometric-decay check for `dist(ℰ_n, B^{d−1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub gap: f64,
    /// `1 − (1−p)λ_{d−1}`.
    pub rate_bound: f64,
    /// `max_{σ′} ‖Proj_{Z_{d−1}} ℰ_n(·,σ′)‖_w` for `n = 0..=N`.
    pub distances: Vec<f64>,
    /// Least-squares slope of `log dist_n` over the window, when enough points lie above the floor.
    pub fitted_slope: Option<f64>,
    /// `max_n dist_n / rate^n` over the window (infinite when the rate is zero and some distance is not).
    pub max_ratio: f64,
    pub holds: bool,
    pub skipped: Option<String>,
}

/// Distances are treated as zero below `FLOOR · max(1, dist_0)`.
pub const DISTANCE_FLOOR: f64 = 1e-12;

/// Checks `dist(ℰ_n, B^{d−1}) = O((1−(1−p)λ_{d−1})^n)` on `n ∈ [lo, hi]`.
pub fn convergence_rate_check(x: &SimplicialComplex, p: f64, lo: usize, hi: usize) -> Result<RateReport> {
    check_laziness(p)?;
    let d = x.dim() as f64;
    if p < d / (d + 1.0) {
        return Err(Error::BelowThreshold { p, threshold: d / (d + 1.0) });
    }
    if lo > hi {
        return Err(Error::InvalidParameter("empty window".into()));
    }
    let j = top(x);
    let h = betti(x, j)?;
    if h > 0 {
        return Ok(RateReport {
            gap: 0.0,
            rate_bound: 1.0,
            distances: Vec::new(),
            fitted_slope: None,
            max_ratio: f64::NAN,
            holds: false,
            skipped: Some(alloc::format!("H_{j} has dimension {h}; the kernel does not approach B^{j}")),
        });
    }
    let gap = spectral_gap(x, j)?;
    let rate = 1.0 - (1.0 - p) * gap;
    let (w, spaces) = cocycle_split(x)?;
    let kernel = exact_heat_kernel(x, p, hi)?;
    let mut distances = Vec::with_capacity(hi + 1);
    for e in &kernel.matrices {
        let mut worst: f64 = 0.0;
        for c in 0..e.ncols() {
            worst = worst.max(distance_to_coboundaries(&spaces, &w, j, e.column(c).iter().copied().collect())?);
        }
        distances.push(worst);
    }
    let floor = DISTANCE_FLOOR * distances[0].max(1.0);
    let window: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&n| distances[n] > floor)
        .map(|n| (n as f64, libm::log(distances[n])))
        .collect();
    let fitted_slope = (window.len() >= 2).then(|| {
        let k = window.len() as f64;
        let mx = window.iter().map(|a| a.0).sum::<f64>() / k;
        let my = window.iter().map(|a| a.1).sum::<f64>() / k;
        let sxy: f64 = window.iter().map(|a| (a.0 - mx) * (a.1 - my)).sum();
        let sxx: f64 = window.iter().map(|a| (a.0 - mx) * (a.0 - mx)).sum();
        sxy / sxx
    });
    let max_ratio = (lo..=hi)
        .map(|n| {
            if distances[n] <= floor {
                0.0
            } else if rate <= 0.0 {
                f64::INFINITY
            } else {
                distances[n] / libm::pow(rate, n as f64)
            }
        })
        .fold(0.0, f64::max);
    let holds = if rate <= 0.0 {
        window.is_empty()
    } else {
        match fitted_slope {
            Some(s) => s <= libm::log(rate) + 1e-6,
            None => true,
        }
    };
    Ok(RateReport { gap, rate_bound: rate, distances, fitted_slope, max_ratio, holds, skipped: None })
}

/// Spectral measure of `𝒜_0` at `𝟙_σ`: atoms `(x_i, mass_i)` summing to one.
pub fn spectral_measure_at(x: &SimplicialComplex, sigma: usize) -> Result<Vec<(f64, f64)>> {
    let w = WeightFunction::up(x)?;
    let j = top(x);
    let lap = whitened_upper_laplacian(x, j, &w)?;
    let (values, vectors) = sym_eigen(lap);
    Ok(values.iter().enumerate().map(|(i, mu)| (1.0 - mu, vectors[(sigma, i)] * vectors[(sigma, i)])).collect())
}

/// Partial sums of `ℰ_n(σ,σ)` and the spectral value of the full sum.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceReport {
    pub partial_sums: Vec<f64>,
    /// Mass of the spectral measure at `x = 1`.
    pub atom_at_one: f64,
    /// `(1/(1−p)) ∫ 1/(1−x) dμ`, or `None` when it diverges.
    pub integral: Option<f64>,
}

impl RecurrenceReport {
    pub fn recurrent(&self) -> bool {
        self.integral.is_none()
    }
}

/// Partial sums `Σ_{n≤N} ℰ_n(σ,σ)` and their spectral limit, for `(d−1)/(d+1) < p < 1`.
pub fn recurrence_sum(x: &SimplicialComplex, sigma: usize, p: f64, horizon: usize) -> Result<RecurrenceReport> {
    check_laziness(p)?;
    let threshold = laziness_threshold(x.dim());
    if p <= threshold || p >= 1.0 {
        return Err(Error::BelowThreshold { p, threshold });
    }
    let s = transition_up(x, p)?;
    let diag = return_kernel_diagonal(&s, sigma, horizon);
    let mut acc = 0.0;
    let partial_sums = diag.iter().map(|v| {
        acc += v;
        acc
    }).collect();
    let atoms = spectral_measure_at(x, sigma)?;
    let atom_at_one: f64 = atoms.iter().filter(|a| (1.0 - a.0).abs() <= KERNEL_TOL).map(|a| a.1).sum();
    let integral = (atom_at_one <= KERNEL_TOL).then(|| {
        atoms
            .iter()
            .filter(|a| (1.0 - a.0).abs() > KERNEL_TOL)
            .map(|a| a.1 / (1.0 - a.0))
            .sum::<f64>()
            / (1.0 - p)
    });
    Ok(RecurrenceReport { partial_sums, atom_at_one, integral })
}
