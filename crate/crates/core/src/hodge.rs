//! Hodge decomposition, Betti numbers, spectral gaps and the eigenvalue-one probe.
//!
//! All subspaces are computed in whitened coordinates `f̂ = W^{1/2} f`, where
//! the weighted inner product becomes the Euclidean one.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::chain::{coboundary, upper_laplacian, Form};
use crate::complex::{SimplicialComplex, WeightFunction};
use crate::error::{Error, Result};
use crate::linalg::{check_dense, column_basis, complement_basis, lanczos_extremes, rank, sym_eigen, whiten, DENSE_LIMIT, RANK_TOL};

/// `w↑` when every `(d−1)`-cell has a coface, otherwise the constant weight 1.
pub fn default_weight(x: &SimplicialComplex) -> WeightFunction {
    WeightFunction::up(x).unwrap_or_else(|_| WeightFunction::uniform(x, 1.0).expect("unit weights"))
}

/// Orthonormal whitened bases of `B^k = im δ_k`, `B_k = im ∂_{k+1}` and `ℋ^k`.
#[derive(Clone, Debug)]
pub struct HodgeSpaces {
    pub k: i32,
    sqrt_w: Vec<f64>,
    pub coboundaries: DMatrix<f64>,
    pub boundaries: DMatrix<f64>,
    pub harmonic: DMatrix<f64>,
}

/// `f = b + h + c` with `b ∈ B_k`, `h ∈ ℋ^k`, `c ∈ B^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeDecomposition {
    pub b: Form,
    pub h: Form,
    pub c: Form,
}

impl HodgeSpaces {
    pub fn new(x: &SimplicialComplex, k: i32, w: &WeightFunction) -> Result<Self> {
        let d = x.dim() as i32;
        if k < 0 || k > d {
            return Err(Error::DimensionOutOfRange { got: k as i64, lo: 0, hi: d as i64 });
        }
        let n = x.num_cells(k);
        check_dense(n)?;
        let sqrt_w: Vec<f64> = w.level(k).iter().map(|v| libm::sqrt(*v)).collect();
        let mut cob = coboundary(x, k)?.to_dense();
        for (i, s) in sqrt_w.iter().enumerate() {
            cob.row_mut(i).scale_mut(*s);
        }
        let mut bd = coboundary(x, k + 1)?.to_dense().transpose();
        for (i, s) in sqrt_w.iter().enumerate() {
            bd.row_mut(i).scale_mut(1.0 / *s);
        }
        let coboundaries = column_basis(&cob, RANK_TOL);
        let boundaries = column_basis(&bd, RANK_TOL);
        let mut both = DMatrix::zeros(n, coboundaries.ncols() + boundaries.ncols());
        both.columns_mut(0, coboundaries.ncols()).copy_from(&coboundaries);
        both.columns_mut(coboundaries.ncols(), boundaries.ncols()).copy_from(&boundaries);
        let harmonic = complement_basis(&both, n);
        Ok(HodgeSpaces { k, sqrt_w, coboundaries, boundaries, harmonic })
    }

    fn whiten(&self, f: &Form) -> Result<DVector<f64>> {
        if f.k != self.k {
            return Err(Error::FormDimension { got: f.k, expected: self.k });
        }
        if f.values.len() != self.sqrt_w.len() {
            return Err(Error::Length { got: f.values.len(), expected: self.sqrt_w.len() });
        }
        Ok(DVector::from_iterator(f.values.len(), f.values.iter().zip(&self.sqrt_w).map(|(a, s)| a * s)))
    }

    fn unwhiten(&self, v: &DVector<f64>) -> Form {
        Form { k: self.k, values: v.iter().zip(&self.sqrt_w).map(|(a, s)| a / s).collect() }
    }

    fn project(&self, q: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
        q * (q.transpose() * v)
    }

    pub fn decompose(&self, f: &Form) -> Result<HodgeDecomposition> {
        let v = self.whiten(f)?;
        let c = self.project(&self.coboundaries, &v);
        let b = self.project(&self.boundaries, &v);
        let h = &v - &c - &b;
        Ok(HodgeDecomposition { b: self.unwhiten(&b), h: self.unwhiten(&h), c: self.unwhiten(&c) })
    }

    /// Orthogonal projection onto `Z_k = (B^k)^⊥ = ker ∂_k`.
    pub fn project_cycles(&self, f: &Form) -> Result<Form> {
        let v = self.whiten(f)?;
        let c = self.project(&self.coboundaries, &v);
        Ok(self.unwhiten(&(v - c)))
    }

    /// A basis of harmonic forms, orthonormal for the weighted inner product.
    pub fn harmonic_forms(&self) -> Vec<Form> {
        self.harmonic.column_iter().map(|c| self.unwhiten(&c.into_owned())).collect()
    }

    pub fn betti(&self) -> usize {
        self.harmonic.ncols()
    }
}

/// Hodge decomposition of a `k`-form under the weight `w`.
pub fn hodge_decompose(x: &SimplicialComplex, f: &Form, w: &WeightFunction) -> Result<HodgeDecomposition> {
    HodgeSpaces::new(x, f.k, w)?.decompose(f)
}

/// Reduced Betti number `dim ℋ^k = n_k − rank δ_k − rank δ_{k+1}`, `−1 ≤ k ≤ d`.
pub fn betti(x: &SimplicialComplex, k: i32) -> Result<usize> {
    let d = x.dim() as i32;
    if k < -1 || k > d {
        return Err(Error::DimensionOutOfRange { got: k as i64, lo: -1, hi: d as i64 });
    }
    let n = x.num_cells(k);
    check_dense(n)?;
    let r_in = if k >= 0 { rank(&coboundary(x, k)?.to_dense(), RANK_TOL) } else { 0 };
    let r_out = rank(&coboundary(x, k + 1)?.to_dense(), RANK_TOL);
    Ok(n - r_in - r_out)
}

/// Reduced Betti numbers for `k = 0..=d`.
pub fn betti_numbers(x: &SimplicialComplex) -> Result<Vec<usize>> {
    (0..=x.dim() as i32).map(|k| betti(x, k)).collect()
}

/// Reduced Euler characteristic `Σ_{k=−1}^{d} (−1)^k n_k`.
pub fn reduced_euler_characteristic(x: &SimplicialComplex) -> i64 {
    (-1..=x.dim() as i32)
        .map(|k| if k.rem_euclid(2) == 0 { x.num_cells(k) as i64 } else { -(x.num_cells(k) as i64) })
        .sum()
}

/// Whitened upper Laplacian `W^{1/2} Δ_k^+ W^{−1/2}`, a symmetric matrix.
pub fn whitened_upper_laplacian(x: &SimplicialComplex, k: i32, w: &WeightFunction) -> Result<DMatrix<f64>> {
    check_dense(x.num_cells(k))?;
    let lap = upper_laplacian(x, k, w)?;
    Ok(whiten(&lap, w.level(k), w.level(k)))
}

/// `λ_k = min Spec(Δ_k^+ |_{Z_k})` with `Z_k = (B^k)^⊥ ⊂ Ω^k`, under the default weight.
pub fn spectral_gap(x: &SimplicialComplex, k: i32) -> Result<f64> {
    let w = default_weight(x);
    let spaces = HodgeSpaces::new(x, k, &w)?;
    let n = x.num_cells(k);
    let z = complement_basis(&spaces.coboundaries, n);
    if z.ncols() == 0 {
        return Err(Error::InvalidParameter("the cycle space Z_k is trivial".into()));
    }
    let lap = whitened_upper_laplacian(x, k, &w)?;
    let restricted = z.transpose() * lap * &z;
    Ok(sym_eigen(restricted).0[0])
}

/// Projection of a form onto `Z_k` under the default weight.
pub fn project_z(x: &SimplicialComplex, f: &Form) -> Result<Form> {
    HodgeSpaces::new(x, f.k, &default_weight(x))?.project_cycles(f)
}

/// Outcome of probing whether `1 ∈ Spec(𝒜_0)`, i.e. `0 ∈ Spec(Δ^+)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueOneProbe {
    /// Smallest eigenvalue of `Δ^+` on all of `Ω^{d−1}`.
    pub smallest: f64,
    pub full_space: bool,
    pub witness: Option<Form>,
    /// Whether `Δ^+` restricted to `Z_{d−1}` has a kernel; `None` when not computed.
    pub nontrivial: Option<bool>,
    pub nontrivial_witness: Option<Form>,
}

/// Numerical check of `1 ∈ Spec(𝒜_0)` on the full space and on `Z_{d−1}`.
pub fn check_eigenvalue_one(x: &SimplicialComplex) -> Result<EigenvalueOneProbe> {
    let w = WeightFunction::up(x)?;
    let j = x.dim() as i32 - 1;
    let n = x.num_cells(j);
    let sw: Vec<f64> = w.level(j).iter().map(|v| libm::sqrt(*v)).collect();
    let unwhiten = |v: &[f64]| Form { k: j, values: v.iter().zip(&sw).map(|(a, s)| a / s).collect() };
    if n > DENSE_LIMIT {
        let lap = upper_laplacian(x, j, &w)?;
        let (lo, _) = lanczos_extremes(
            n,
            |v| {
                let u: Vec<f64> = v.iter().zip(&sw).map(|(a, s)| a / s).collect();
                lap.apply(&u).iter().zip(&sw).map(|(a, s)| a * s).collect()
            },
            300,
            0,
        );
        return Ok(EigenvalueOneProbe {
            smallest: lo,
            full_space: lo.abs() < 1e-6,
            witness: None,
            nontrivial: None,
            nontrivial_witness: None,
        });
    }
    let lap = whitened_upper_laplacian(x, j, &w)?;
    let scale = lap.amax().max(1.0);
    let (values, vectors) = sym_eigen(lap.clone());
    let smallest = values.first().copied().unwrap_or(f64::INFINITY);
    let full_space = smallest.abs() <= RANK_TOL * scale;
    let witness = full_space.then(|| unwhiten(vectors.column(0).as_slice()));
    let spaces = HodgeSpaces::new(x, j, &w)?;
    let z = complement_basis(&spaces.coboundaries, n);
    let (nontrivial, nontrivial_witness) = if z.ncols() == 0 {
        (false, None)
    } else {
        let (zv, zvec) = sym_eigen(z.transpose() * &lap * &z);
        let hit = zv[0].abs() <= RANK_TOL * scale;
        let wv = &z * zvec.column(0);
        (hit, hit.then(|| unwhiten(wv.as_slice())))
    };
    Ok(EigenvalueOneProbe { smallest, full_space, witness, nontrivial: Some(nontrivial), nontrivial_witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::chain::inner_product;

    #[test]
    fn betti_of_catalog() {
        assert_eq!(betti_numbers(&catalog::single_triangle()).unwrap(), [0, 0, 0]);
        assert_eq!(betti_numbers(&catalog::hollow_triangle()).unwrap(), [0, 1]);
        assert_eq!(betti_numbers(&catalog::hollow_tetrahedron()).unwrap(), [0, 0, 1]);
        assert_eq!(betti_numbers(&catalog::torus7()).unwrap(), [0, 2, 1]);
        let t = catalog::single_triangle();
        assert_eq!(betti(&t.disjoint_union(&t), 0).unwrap(), 1);
        assert_eq!(betti(&t, -1).unwrap(), 0);
    }

    #[test]
    fn euler_matches_betti() {
        for x in [catalog::torus7(), catalog::hollow_tetrahedron(), catalog::two_triangles()] {
            let b = betti_numbers(&x).unwrap();
            let alt: i64 = b.iter().enumerate().map(|(k, &v)| if k % 2 == 0 { v as i64 } else { -(v as i64) }).sum();
            assert_eq!(alt, reduced_euler_characteristic(&x));
        }
    }

    #[test]
    fn coboundary_is_its_own_component() {
        let x = catalog::torus7();
        let w = default_weight(&x);
        let g = Form::new(&x, 0, (0..7).map(|i| (i * i) as f64).collect()).unwrap();
        let f = g.apply(&coboundary(&x, 1).unwrap()).unwrap();
        let dec = hodge_decompose(&x, &f, &w).unwrap();
        assert!(dec.b.values.iter().chain(&dec.h.values).all(|v| v.abs() < 1e-10));
        assert!(dec.c.values.iter().zip(&f.values).all(|(a, b)| (a - b).abs() < 1e-10));
    }

    #[test]
    fn tetrahedron_top_has_no_boundaries() {
        let x = catalog::hollow_tetrahedron();
        let w = default_weight(&x);
        let f = Form::new(&x, 2, vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let dec = hodge_decompose(&x, &f, &w).unwrap();
        assert!(dec.b.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn torus_decomposition_recombines() {
        let x = catalog::torus7();
        let w = default_weight(&x);
        let f = Form::new(&x, 1, (0..21).map(|i| libm::sin(i as f64 * 1.3)).collect()).unwrap();
        let dec = hodge_decompose(&x, &f, &w).unwrap();
        for i in 0..21 {
            assert!((dec.b.values[i] + dec.h.values[i] + dec.c.values[i] - f.values[i]).abs() < 1e-10);
        }
        assert!(inner_product(&dec.b, &dec.h, &w).unwrap().abs() < 1e-10);
        assert!(inner_product(&dec.h, &dec.c, &w).unwrap().abs() < 1e-10);
        assert!(inner_product(&dec.b, &dec.c, &w).unwrap().abs() < 1e-10);
    }

    #[test]
    fn triangle_gap_is_three() {
        assert!((spectral_gap(&catalog::single_triangle(), 1).unwrap() - 3.0).abs() < 1e-10);
        assert!(spectral_gap(&catalog::hollow_tetrahedron(), 1).unwrap() > 1e-6);
        assert!(spectral_gap(&catalog::torus7(), 1).unwrap().abs() < 1e-10);
    }

    #[test]
    fn gap_of_union_is_min() {
        let a = catalog::single_triangle();
        let b = catalog::hollow_tetrahedron();
        let u = a.disjoint_union(&b);
        let want = spectral_gap(&a, 1).unwrap().min(spectral_gap(&b, 1).unwrap());
        assert!((spectral_gap(&u, 1).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn projection_properties() {
        let x = catalog::torus7();
        let f = Form::new(&x, 1, (0..21).map(|i| libm::cos(i as f64)).collect()).unwrap();
        let p1 = project_z(&x, &f).unwrap();
        let p2 = project_z(&x, &p1).unwrap();
        assert!(p1.values.iter().zip(&p2.values).all(|(a, b)| (a - b).abs() < 1e-12));
        let g = Form::new(&x, 0, (0..7).map(|i| i as f64).collect()).unwrap();
        let exact = g.apply(&coboundary(&x, 1).unwrap()).unwrap();
        assert!(project_z(&x, &exact).unwrap().values.iter().all(|v| v.abs() < 1e-10));
        let spaces = HodgeSpaces::new(&x, 1, &default_weight(&x)).unwrap();
        for h in spaces.harmonic_forms() {
            let ph = project_z(&x, &h).unwrap();
            assert!(ph.values.iter().zip(&h.values).all(|(a, b)| (a - b).abs() < 1e-10));
        }
    }

    #[test]
    fn eigenvalue_one_probe() {
        let p = check_eigenvalue_one(&catalog::single_triangle()).unwrap();
        assert!(p.full_space);
        assert_eq!(p.nontrivial, Some(false));
        let p = check_eigenvalue_one(&catalog::torus7()).unwrap();
        assert_eq!(p.nontrivial, Some(true));
        assert!(p.nontrivial_witness.is_some());
    }
}
