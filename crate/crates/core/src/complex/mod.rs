//! Finite simplicial complexes, oriented cells, neighbor relations and weights.
//!
//! Cells of each dimension are stored in lexicographic order and addressed by
//! their position. Level `j` holds the `j`-cells for `−1 ≤ j ≤ d`; level −1
//! contains only the empty cell.

mod cell;
mod connectivity;
mod weights;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

pub use cell::{permutation_sign, Cell, OrientedCell, Sign, VertexId};
pub use connectivity::Components;
pub use weights::{is_k_good, WeightFunction};

pub(crate) use cell::alternating;

use crate::error::{Error, Result};

/// A cell of known dimension addressed by index, with an orientation sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedIndex {
    pub index: usize,
    pub sign: Sign,
}

impl OrientedIndex {
    pub fn new(index: usize, sign: Sign) -> Self {
        OrientedIndex { index, sign }
    }

    pub fn positive(index: usize) -> Self {
        OrientedIndex { index, sign: 1 }
    }

    pub fn flip(self) -> Self {
        OrientedIndex { index: self.index, sign: -self.sign }
    }

    /// Dense code `2·index + [sign < 0]`.
    pub fn code(self) -> usize {
        2 * self.index + usize::from(self.sign < 0)
    }

    pub fn from_code(code: usize) -> Self {
        OrientedIndex { index: code / 2, sign: if code.is_multiple_of(2) { 1 } else { -1 } }
    }
}

/// An immutable finite simplicial complex with precomputed incidence.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialComplex {
    dim: usize,
    cells: Vec<Vec<Cell>>,
    lookup: Vec<BTreeMap<Cell, usize>>,
    faces: Vec<Vec<Vec<u32>>>,
    cofaces: Vec<Vec<Vec<u32>>>,
}

/// Builds the downward closure of the given faces.
pub fn build_complex(maximal_faces: &[Vec<VertexId>]) -> Result<SimplicialComplex> {
    SimplicialComplex::from_faces(maximal_faces)
}

impl SimplicialComplex {
    pub fn from_faces(faces: &[Vec<VertexId>]) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::NoFaces);
        }
        let cells = faces.iter().map(|f| Cell::new(f.clone())).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_cells(cells))
    }

    fn from_cells(input: Vec<Cell>) -> Self {
        let dim = input.iter().map(|c| c.vertices().len() - 1).max().unwrap_or(0);
        let mut levels: Vec<BTreeSet<Cell>> = vec![BTreeSet::new(); dim + 2];
        for c in input {
            let level = c.vertices().len();
            levels[level].insert(c);
        }
        for level in (2..=dim + 1).rev() {
            let upper: Vec<Cell> = levels[level].iter().cloned().collect();
            for c in &upper {
                for i in 0..level {
                    levels[level - 1].insert(c.face(i));
                }
            }
        }
        levels[0].insert(Cell::empty());

        let cells: Vec<Vec<Cell>> = levels.into_iter().map(|s| s.into_iter().collect()).collect();
        let lookup: Vec<BTreeMap<Cell, usize>> = cells
            .iter()
            .map(|lv| lv.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect())
            .collect();
        let mut faces: Vec<Vec<Vec<u32>>> = Vec::with_capacity(dim + 2);
        faces.push(vec![Vec::new()]);
        for level in 1..=dim + 1 {
            let f = cells[level]
                .iter()
                .map(|c| {
                    (0..level)
                        .map(|i| lookup[level - 1][&c.face(i)] as u32)
                        .collect()
                })
                .collect();
            faces.push(f);
        }
        let mut cofaces: Vec<Vec<Vec<u32>>> =
            cells.iter().map(|lv| vec![Vec::new(); lv.len()]).collect();
        for level in 1..=dim + 1 {
            for (t, fs) in faces[level].iter().enumerate() {
                for &s in fs {
                    cofaces[level - 1][s as usize].push(t as u32);
                }
            }
        }
        SimplicialComplex { dim, cells, lookup, faces, cofaces }
    }

    /// Maximal dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn level(&self, j: i32) -> usize {
        assert!(j >= -1 && j <= self.dim as i32, "dimension {j} out of range");
        (j + 1) as usize
    }

    pub fn has_dim(&self, j: i32) -> bool {
        j >= -1 && j <= self.dim as i32
    }

    /// Canonical list of `j`-cells, `−1 ≤ j ≤ d`.
    pub fn cells(&self, j: i32) -> &[Cell] {
        &self.cells[self.level(j)]
    }

    pub fn num_cells(&self, j: i32) -> usize {
        if self.has_dim(j) {
            self.cells[self.level(j)].len()
        } else {
            0
        }
    }

    pub fn cell(&self, j: i32, index: usize) -> &Cell {
        &self.cells[self.level(j)][index]
    }

    pub fn index_of(&self, cell: &Cell) -> Option<usize> {
        let j = cell.dim();
        if !self.has_dim(j) {
            return None;
        }
        self.lookup[self.level(j)].get(cell).copied()
    }

    pub fn require_index(&self, cell: &Cell) -> Result<usize> {
        self.index_of(cell).ok_or_else(|| Error::UnknownCell(cell.vertices().to_vec()))
    }

    /// Resolves an oriented cell to its index and sign.
    pub fn oriented_index(&self, cell: &OrientedCell) -> Result<OrientedIndex> {
        Ok(OrientedIndex::new(self.require_index(&cell.cell)?, cell.sign))
    }

    pub fn oriented_cell(&self, j: i32, o: OrientedIndex) -> OrientedCell {
        OrientedCell::new(self.cell(j, o.index).clone(), o.sign)
    }

    /// Indices of the faces of a `j`-cell; entry `i` is the cell with vertex `i` removed.
    pub fn faces_of(&self, j: i32, index: usize) -> &[u32] {
        &self.faces[self.level(j)][index]
    }

    /// Indices of the `(j+1)`-cells containing the given `j`-cell.
    pub fn cofaces_of(&self, j: i32, index: usize) -> &[u32] {
        &self.cofaces[self.level(j)][index]
    }

    pub fn degree(&self, j: i32, index: usize) -> usize {
        self.cofaces[self.level(j)][index].len()
    }

    /// Position of the `j`-cell `face` inside the face list of the `(j+1)`-cell `coface`.
    pub fn face_position(&self, j: i32, face: usize, coface: usize) -> usize {
        self.faces_of(j + 1, coface)
            .iter()
            .position(|&f| f as usize == face)
            .expect("face not incident to coface")
    }

    /// Largest degree among the `j`-cells.
    pub fn max_degree(&self, j: i32) -> usize {
        self.cofaces[self.level(j)].iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Cells that are not a face of any other cell, in canonical order.
    pub fn maximal_faces(&self) -> Vec<Cell> {
        (0..=self.dim as i32)
            .flat_map(|j| {
                (0..self.num_cells(j))
                    .filter(move |&i| self.degree(j, i) == 0)
                    .map(move |i| self.cell(j, i).clone())
            })
            .collect()
    }

    /// Up-neighbors of the positively oriented `j`-cell `index` (`j < d`), as `(index, sign)`.
    ///
    /// Each coface contributes its remaining `j+1` faces with sign `−(−1)^{a+b}`.
    pub fn up_neighbor_indices(&self, j: i32, index: usize) -> Vec<OrientedIndex> {
        let mut out = Vec::with_capacity((j as usize + 1) * self.degree(j, index));
        for &t in self.cofaces_of(j, index) {
            let fs = self.faces_of(j + 1, t as usize);
            let a = fs.iter().position(|&f| f as usize == index).unwrap();
            for (b, &f) in fs.iter().enumerate() {
                if b != a {
                    out.push(OrientedIndex::new(f as usize, -alternating(a + b)));
                }
            }
        }
        out
    }

    /// Up-neighbors of an oriented `(d−1)`-cell.
    pub fn up_neighbors(&self, sigma: &OrientedCell) -> Result<Vec<OrientedCell>> {
        let j = sigma.dim();
        let d = self.dim as i32;
        if j != d - 1 {
            return Err(Error::DimensionOutOfRange { got: j as i64, lo: d as i64 - 1, hi: d as i64 - 1 });
        }
        let o = self.oriented_index(sigma)?;
        Ok(self
            .up_neighbor_indices(j, o.index)
            .into_iter()
            .map(|n| OrientedCell::new(self.cell(j, n.index).clone(), n.sign * o.sign))
            .collect())
    }

    /// Down-adjacent cells of the positively oriented `j`-cell `index` (`j ≥ 1`).
    pub fn down_adjacent_indices(&self, j: i32, index: usize) -> Vec<OrientedIndex> {
        let mut out = Vec::new();
        for (a, &s) in self.faces_of(j, index).iter().enumerate() {
            for &t in self.cofaces_of(j - 1, s as usize) {
                if t as usize == index {
                    continue;
                }
                let b = self.face_position(j - 1, s as usize, t as usize);
                out.push(OrientedIndex::new(t as usize, -alternating(a + b)));
            }
        }
        out
    }

    /// Down-adjacent oriented cells of an oriented `j`-cell with `j ≥ 1`.
    pub fn down_adjacent(&self, tau: &OrientedCell) -> Result<Vec<OrientedCell>> {
        let j = tau.dim();
        if j < 1 || j > self.dim as i32 {
            return Err(Error::DimensionOutOfRange { got: j as i64, lo: 1, hi: self.dim as i64 });
        }
        let o = self.oriented_index(tau)?;
        Ok(self
            .down_adjacent_indices(j, o.index)
            .into_iter()
            .map(|n| OrientedCell::new(self.cell(j, n.index).clone(), n.sign * o.sign))
            .collect())
    }

    /// Disjoint union; vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let shift = self.cells(0).iter().map(|c| c.vertices()[0] + 1).max().unwrap_or(0);
        let mut faces = self.maximal_faces();
        faces.extend(other.maximal_faces().into_iter().map(|c| {
            Cell::from_sorted(c.vertices().iter().map(|v| v + shift).collect())
        }));
        Self::from_cells(faces)
    }

    /// Returns an error unless every `(d−1)`-cell has at least one coface.
    pub fn require_positive_degrees(&self) -> Result<()> {
        let j = self.dim as i32 - 1;
        match (0..self.num_cells(j)).find(|&i| self.degree(j, i) == 0) {
            Some(i) => Err(Error::ZeroDegree(self.cell(j, i).vertices().to_vec())),
            None => Ok(()),
        }
    }
}
