use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Opaque vertex label.
pub type VertexId = u32;

/// An unoriented simplex, stored as a strictly increasing vertex list.
///
/// The empty cell (dimension −1) is representable through [`Cell::empty`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell(Vec<VertexId>);

impl Cell {
    /// Sorts the vertices; rejects empty input and repeated vertices.
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyFace);
        }
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVertex(w[0]));
        }
        Ok(Cell(vertices))
    }

    pub fn empty() -> Self {
        Cell(Vec::new())
    }

    pub(crate) fn from_sorted(vertices: Vec<VertexId>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Cell(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// Number of vertices minus one.
    pub fn dim(&self) -> i32 {
        self.0.len() as i32 - 1
    }

    /// The face obtained by deleting the `i`-th vertex.
    pub fn face(&self, i: usize) -> Cell {
        let mut v = self.0.clone();
        v.remove(i);
        Cell(v)
    }

    pub fn is_face_of(&self, other: &Cell) -> bool {
        self.0.iter().all(|v| other.0.binary_search(v).is_ok())
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Sign of an orientation relative to the sorted vertex order.
pub type Sign = i8;

/// A cell together with one of its two orientations.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OrientedCell {
    pub cell: Cell,
    pub sign: Sign,
}

impl OrientedCell {
    pub fn new(cell: Cell, sign: Sign) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        OrientedCell { cell, sign }
    }

    pub fn positive(cell: Cell) -> Self {
        OrientedCell { cell, sign: 1 }
    }

    /// The orientation represented by the given vertex ordering.
    pub fn from_ordering(vertices: &[VertexId]) -> Result<Self> {
        let cell = Cell::new(vertices.to_vec())?;
        Ok(OrientedCell { cell, sign: permutation_sign(vertices) })
    }

    pub fn flip(&self) -> Self {
        OrientedCell { cell: self.cell.clone(), sign: -self.sign }
    }

    pub fn dim(&self) -> i32 {
        self.cell.dim()
    }

    /// A vertex ordering representing this orientation.
    pub fn ordering(&self) -> Vec<VertexId> {
        let mut v = self.cell.0.clone();
        if self.sign < 0 && v.len() >= 2 {
            v.swap(0, 1);
        }
        v
    }

    /// Orientations induced on the faces, in face order: `(−1)^i [v0,…,v̂i,…,vj]`.
    pub fn induced_face_orientations(&self) -> Result<Vec<OrientedCell>> {
        let j = self.dim();
        if j < 1 {
            return Err(Error::DimensionOutOfRange { got: j as i64, lo: 1, hi: i64::MAX });
        }
        Ok((0..self.cell.0.len())
            .map(|i| OrientedCell {
                cell: self.cell.face(i),
                sign: self.sign * alternating(i),
            })
            .collect())
    }
}

/// `(−1)^i`.
pub(crate) fn alternating(i: usize) -> Sign {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sign of the permutation sorting `v`, counted by inversions.
pub fn permutation_sign(v: &[VertexId]) -> Sign {
    let mut inversions = 0usize;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inversions += 1;
            }
        }
    }
    alternating(inversions)
}
