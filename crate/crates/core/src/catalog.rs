//! Small reference complexes used throughout the test suites and the CLI.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{build_complex, SimplicialComplex, VertexId};

fn build(faces: Vec<Vec<VertexId>>) -> SimplicialComplex {
    build_complex(&faces).expect("catalog faces are valid")
}

/// One filled triangle `{0,1,2}`.
pub fn single_triangle() -> SimplicialComplex {
    build(vec![vec![0, 1, 2]])
}

/// The boundary of a triangle, a 1-complex.
pub fn hollow_triangle() -> SimplicialComplex {
    build(vec![vec![0, 1], vec![1, 2], vec![0, 2]])
}

/// Triangles `{0,1,2}` and `{1,2,3}` glued along `{1,2}`.
pub fn two_triangles() -> SimplicialComplex {
    build(vec![vec![0, 1, 2], vec![1, 2, 3]])
}

/// The four boundary triangles of a tetrahedron (a 2-sphere).
pub fn hollow_tetrahedron() -> SimplicialComplex {
    build(vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])
}

/// The 7-vertex triangulation of the torus: `{i,i+1,i+3}` and `{i,i+2,i+3}` mod 7.
pub fn torus7() -> SimplicialComplex {
    let mut faces = Vec::new();
    for i in 0..7u32 {
        faces.push(vec![i, (i + 1) % 7, (i + 3) % 7]);
        faces.push(vec![i, (i + 2) % 7, (i + 3) % 7]);
    }
    build(faces)
}

/// A random pure `d`-complex: up to `faces` distinct `d`-simplices on `vertices` vertices.
pub fn random_pure(seed: u64, vertices: u32, d: usize, faces: usize) -> SimplicialComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<VertexId> = (0..vertices).collect();
    let mut out: Vec<Vec<VertexId>> = Vec::new();
    for _ in 0..faces {
        pool.shuffle(&mut rng);
        let mut f = pool[..=d].to_vec();
        f.sort_unstable();
        if !out.contains(&f) {
            out.push(f);
        }
    }
    build(out)
}

/// A random 2-complex whose largest edge degree is exactly `max_degree`.
pub fn random_bounded_degree(seed: u64, vertices: u32, triangles: usize, max_degree: usize) -> SimplicialComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<VertexId> = (0..vertices).collect();
    loop {
        let mut faces: Vec<Vec<VertexId>> = Vec::new();
        let mut attempts = 0;
        while faces.len() < triangles && attempts < 1000 {
            attempts += 1;
            pool.shuffle(&mut rng);
            let mut f = pool[..3].to_vec();
            f.sort_unstable();
            if faces.contains(&f) {
                continue;
            }
            faces.push(f);
            let x = build(faces.clone());
            if x.max_degree(1) > max_degree {
                faces.pop();
            }
        }
        let x = build(faces);
        if x.max_degree(1) == max_degree {
            return x;
        }
    }
}
