//! Simplicial branching random walks on finite simplicial complexes.
//!
//! The crate covers chain complexes with weighted Laplacians, Hodge theory,
//! exact and simulated heat kernels of the branching walk, spectral measures
//! of arboreal complexes, Dirichlet problems and the lower walk on top cells.
//! It is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arboreal;
pub mod catalog;
pub mod chain;
pub mod complex;
pub mod dirichlet;
pub mod error;
pub mod hodge;
pub mod kernels;
pub mod linalg;
pub mod lower_walk;
pub mod quadrature;
pub mod sbrw;

pub use complex::{build_complex, Cell, OrientedCell, OrientedIndex, SimplicialComplex, VertexId, WeightFunction};
pub use error::{Error, Result};
