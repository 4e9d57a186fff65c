use std::collections::HashSet;

use num_complex::Complex64;
use proptest::prelude::*;
use sbrw_core::arboreal::{self, ArborealMeasure};
use sbrw_core::catalog;
use sbrw_core::chain::{boundary, coboundary, inner_product, lower_laplacian, transition_up, Form};
use sbrw_core::dirichlet::{self, BoundaryData, DirichletSolution};
use sbrw_core::hodge::{betti_numbers, hodge_decompose, reduced_euler_characteristic};
use sbrw_core::kernels::{exact_heat_kernel, generating_functions, walk_expectation, walk_laziness};
use sbrw_core::linalg::sym_eigen;
use sbrw_core::lower_walk::{exact_lower_kernel, lower_equivalence_check, max_lower_degree};
use sbrw_core::sbrw::{SimConfig, Walker};
use sbrw_core::{OrientedIndex, SimplicialComplex, WeightFunction};

fn complex_strategy() -> impl Strategy<Value = SimplicialComplex> {
    (any::<u64>(), 1usize..=3, 3u32..=7, 1usize..=8).prop_map(|(seed, d, extra, faces)| {
        catalog::random_pure(seed, d as u32 + extra.min(4), d, faces)
    })
}

fn values(seed: u64, n: usize) -> Vec<f64> {
    let mut s = seed | 1;
    (0..n)
        .map(|_| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn weights(x: &SimplicialComplex, seed: u64) -> WeightFunction {
    let v = values(seed, 4096);
    WeightFunction::from_fn(x, |j, i| 1.0 + v[((j + 1) as usize * 613 + i) % v.len()] + 0.5).unwrap()
}

fn subset(n: usize, mask: u64) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coboundary_squares_to_zero(x in complex_strategy()) {
        for k in 0..x.dim() as i32 {
            let dd = coboundary(&x, k + 1).unwrap().compose(&coboundary(&x, k).unwrap());
            prop_assert_eq!(dd.nnz(), 0);
        }
    }

    #[test]
    fn boundary_is_weighted_adjoint(x in complex_strategy(), seed in any::<u64>()) {
        let w = weights(&x, seed);
        for k in 0..=x.dim() as i32 {
            let f = Form::new(&x, k - 1, values(seed ^ 1, x.num_cells(k - 1))).unwrap();
            let g = Form::new(&x, k, values(seed ^ 2, x.num_cells(k))).unwrap();
            let lhs = inner_product(&f.apply(&coboundary(&x, k).unwrap()).unwrap(), &g, &w).unwrap();
            let rhs = inner_product(&f, &g.apply(&boundary(&x, k, &w).unwrap()).unwrap(), &w).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn hodge_components_are_orthogonal(x in complex_strategy(), seed in any::<u64>()) {
        let w = weights(&x, seed);
        for k in 0..=x.dim() as i32 {
            let f = Form::new(&x, k, values(seed ^ 3, x.num_cells(k))).unwrap();
            let h = hodge_decompose(&x, &f, &w).unwrap();
            let ip = |a: &Form, b: &Form| inner_product(a, b, &w).unwrap().abs();
            prop_assert!(ip(&h.b, &h.h) < 1e-8 && ip(&h.b, &h.c) < 1e-8 && ip(&h.h, &h.c) < 1e-8);
            let sum: Vec<f64> = (0..f.values.len()).map(|i| h.b.values[i] + h.h.values[i] + h.c.values[i]).collect();
            prop_assert!(sum.iter().zip(&f.values).all(|(a, b)| (a - b).abs() < 1e-10));
        }
    }

    #[test]
    fn euler_characteristic_matches_betti(x in complex_strategy()) {
        let b = betti_numbers(&x).unwrap();
        let alt: i64 = b.iter().enumerate().map(|(k, &v)| if k % 2 == 0 { v as i64 } else { -(v as i64) }).sum();
        prop_assert_eq!(alt, reduced_euler_characteristic(&x));
    }

    #[test]
    fn walk_expectation_matches_kernel(x in complex_strategy(), p in 0.0f64..1.0) {
        let e = exact_heat_kernel(&x, p, 8).unwrap();
        let w = walk_expectation(&x, walk_laziness(p, x.dim()), 8).unwrap();
        for n in 0..=8 {
            prop_assert!((&e.matrices[n] - &w.matrices[n]).amax() <= 1e-12 * e.matrices[n].amax().max(1.0));
        }
    }

    #[test]
    fn return_kernel_identity(x in complex_strategy(), p in 0.0f64..1.0) {
        let g = generating_functions(&x, p, 0, 15).unwrap();
        prop_assert!(g.residual() <= 1e-9 * g.g.coeffs.iter().fold(1.0f64, |a, b| a.max(b.abs())));
    }

    #[test]
    fn transition_has_no_eigenvalue_above_one(x in complex_strategy(), p in 0.0f64..1.0) {
        let w = WeightFunction::up(&x).unwrap();
        let j = x.dim() as i32 - 1;
        let s = transition_up(&x, p).unwrap().to_dense();
        let sw: Vec<f64> = w.level(j).iter().map(|v| v.sqrt()).collect();
        let n = s.nrows();
        let sym = nalgebra::DMatrix::from_fn(n, n, |r, c| s[(r, c)] * sw[r] / sw[c]);
        let (ev, _) = sym_eigen(sym);
        prop_assert!(ev.iter().all(|&v| v <= 1.0 + 1e-10 && v >= 1.0 - (1.0 - p) * (x.dim() as f64 + 1.0) - 1e-10));
    }

    #[test]
    fn effective_state_is_antisymmetric(x in complex_strategy(), seed in any::<u64>(), p in 0.0f64..1.0) {
        let walker = Walker::new(&x).unwrap();
        let mut cfg = SimConfig::new(p, 4, 1, seed);
        cfg.max_particles = 1_000_000;
        let rec = walker.simulate_run(OrientedIndex::positive(0), &cfg, 0).unwrap();
        for s in &rec.states {
            for i in 0..x.num_cells(x.dim() as i32 - 1) {
                prop_assert_eq!(s.eval(OrientedIndex::new(i, -1)), -s.eval(OrientedIndex::positive(i)));
            }
        }
    }

    #[test]
    fn absorbing_runs_are_monotone(seed in any::<u64>(), mask in 1u64..u64::MAX, p in 0.0f64..1.0) {
        let x = catalog::random_pure(seed, 6, 2, 7);
        let m = x.num_cells(1);
        let big = subset(m, mask % ((1u64 << m) - 1) + 1);
        prop_assume!(big.len() < m && !big.is_empty());
        let small: Vec<usize> = big.iter().copied().step_by(2).collect();
        let walker = Walker::new(&x).unwrap();
        let start = OrientedIndex::positive((0..m).find(|i| !big.contains(i)).unwrap());
        let run = |a: &[usize]| {
            let mut cfg = SimConfig::new(p, 5, 1, seed);
            cfg.absorbing = Some(a.to_vec());
            cfg.track_ancestry = true;
            walker.simulate_run(start, &cfg, 0).unwrap().ancestry.unwrap()
        };
        let (fs, fb) = (run(&small), run(&big));
        for n in 0..=5 {
            let frozen_big: HashSet<u64> = fb.generations[n]
                .iter()
                .filter(|q| big.contains(&OrientedIndex::from_code(q.cell as usize).index))
                .map(|q| q.label)
                .collect();
            for (i, q) in fs.generations[n].iter().enumerate() {
                if !small.contains(&OrientedIndex::from_code(q.cell as usize).index) {
                    continue;
                }
                let (mut g, mut at, mut found) = (n, i, false);
                loop {
                    let r = &fs.generations[g][at];
                    if frozen_big.contains(&r.label) {
                        found = true;
                        break;
                    }
                    if g == 0 {
                        break;
                    }
                    at = r.parent as usize;
                    g -= 1;
                }
                prop_assert!(found);
            }
        }
    }

    #[test]
    fn truncation_locality(d in 1usize..=2, k in 2usize..=3, p in 0.0f64..1.0) {
        let r = 3;
        let small = arboreal::build_truncated_t(d, k, r).unwrap();
        let large = arboreal::build_truncated_t(d, k, r + 2).unwrap();
        let a = sbrw_core::kernels::return_kernel_diagonal(&transition_up(&small.complex, p).unwrap(), small.sigma0.index, 2 * r - 1);
        let b = sbrw_core::kernels::return_kernel_diagonal(&transition_up(&large.complex, p).unwrap(), large.sigma0.index, 2 * r - 1);
        for n in 0..2 * r {
            prop_assert!((a[n] - b[n]).abs() < 1e-14);
        }
    }

    #[test]
    fn functional_equation_holds(d in 1usize..=3, k in 2usize..=4, p in 0.0f64..1.0) {
        let u = arboreal::truncated_u_series(d, k, p, 7).unwrap();
        prop_assert!(arboreal::functional_equation_residual(d, k, p, &u) <= 1e-10);
        prop_assert!((u[1] - (1.0 - p) / k as f64).abs() < 1e-15);
    }

    #[test]
    fn spectral_measure_is_probability(d in 1usize..=4, k in 1usize..=7, x in -6.0f64..2.0) {
        let m = ArborealMeasure::new(d, k).unwrap();
        prop_assert!(m.density(x) >= 0.0);
        prop_assert!((m.total_mass().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn stieltjes_is_herglotz(d in 1usize..=4, k in 1usize..=7, re in -8.0f64..8.0, im in 1e-3f64..10.0) {
        let s = arboreal::stieltjes(Complex64::new(re, im), d, k).unwrap();
        prop_assert!(s.im > 0.0);
    }

    #[test]
    fn dirichlet_implications(seed in any::<u64>(), mask in any::<u64>(), p in 0.34f64..0.99) {
        let x = catalog::random_pure(seed, 5, 2, 4);
        let m = x.num_cells(1);
        let a = subset(m, mask % ((1u64 << m) - 2) + 1);
        prop_assume!(!a.is_empty() && a.len() < m);
        let inv = dirichlet::is_invertible(&x, &a).unwrap();
        if dirichlet::check_exhaustive(&x, &a).unwrap().0 {
            prop_assert!(inv.invertible);
        }
        if dirichlet::check_open_hinge(&x, &a).unwrap() {
            prop_assert!(!inv.invertible);
        }
        let r = dirichlet::restrict(&x, &a).unwrap();
        let spec = r.spectrum();
        prop_assert!(spec.iter().all(|&v| v > -1e-10 && v < 3.0 + 1e-10));
        let g = values(seed, r.interior.len());
        prop_assert!(dirichlet::energy_identity_gap(&x, &a, &g).unwrap() < 1e-12);
        let vals: Vec<(OrientedIndex, f64)> = a.iter().zip(values(seed ^ 9, a.len())).map(|(&c, v)| (OrientedIndex::positive(c), v)).collect();
        let bd = BoundaryData::new(&x, &a, &vals).unwrap();
        match (dirichlet::solve_dirichlet(&x, &bd, p).unwrap(), dirichlet::solve_direct(&x, &bd).unwrap()) {
            (DirichletSolution::Solved(f), DirichletSolution::Solved(h)) => {
                prop_assert!(inv.invertible);
                prop_assert!(f.values.iter().zip(&h.values).all(|(u, v)| (u - v).abs() < 1e-10));
                prop_assert!(dirichlet::dirichlet_residual(&x, &a, &f).unwrap() < 1e-9);
                let green = dirichlet::green_function(&x, &a, p).unwrap();
                let ident = &green.matrix * &r.block * (1.0 - p);
                prop_assert!((ident - nalgebra::DMatrix::identity(r.interior.len(), r.interior.len())).amax() < 1e-10);
                let neumann = dirichlet::green_neumann(&x, &a, p, 1e-14, 200_000).unwrap();
                prop_assert!((neumann - &green.matrix).amax() < 1e-8 * green.matrix.amax().max(1.0));
                let other = dirichlet::solve_dirichlet(&x, &bd, 0.5 * (p + 1.0)).unwrap();
                let other = other.form().unwrap();
                prop_assert!(f.values.iter().zip(&other.values).all(|(u, v)| (u - v).abs() < 1e-10));
            }
            (DirichletSolution::Degenerate(rep), DirichletSolution::Degenerate(_)) => {
                prop_assert!(!inv.invertible);
                prop_assert!(rep.witness_coboundary_norm.unwrap() < 1e-8);
            }
            _ => prop_assert!(false, "solvers disagree on invertibility"),
        }
    }

    #[test]
    fn graph_component_criterion(seed in any::<u64>(), mask in any::<u64>()) {
        let x = catalog::random_pure(seed, 7, 1, 5);
        let m = x.num_cells(0);
        let a = subset(m, mask % ((1u64 << m) - 2) + 1);
        prop_assume!(!a.is_empty() && a.len() < m);
        let inv = dirichlet::is_invertible(&x, &a).unwrap().invertible;
        prop_assert_eq!(inv, dirichlet::meets_every_component(&x, &a).unwrap());
    }

    #[test]
    fn lower_laplacian_spectrum(x in complex_strategy()) {
        let w = WeightFunction::down(&x).unwrap();
        let lap = lower_laplacian(&x, x.dim() as i32, &w).unwrap().to_dense();
        let (ev, _) = sym_eigen(lap);
        let bound = max_lower_degree(&x).max(1) as f64;
        prop_assert!(ev.iter().all(|&v| v > -1e-12 && v < bound + 1e-12));
    }

    #[test]
    fn lower_equivalence_on_random(seed in any::<u64>(), p in 0.0f64..1.0) {
        let x = catalog::random_pure(seed, 6, 2, 8);
        prop_assume!(max_lower_degree(&x) >= 2);
        prop_assert!(lower_equivalence_check(&x, p, 10).unwrap() <= 1e-12);
        let k = exact_lower_kernel(&x, p, 3).unwrap();
        prop_assert!((&k.matrices[1] - k.matrices[1].transpose()).amax() < 1e-15);
    }
}
