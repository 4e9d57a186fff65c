use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::{alternating, OrientedIndex, Sign, SimplicialComplex};
use crate::error::{Error, Result};

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Relabels roots as `0..count` in order of first appearance.
    fn labels(&mut self) -> (Vec<usize>, usize) {
        let n = self.0.len();
        let mut label = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut count = 0;
        for x in 0..n {
            let r = self.find(x);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            out[x] = label[r];
        }
        (out, count)
    }
}

/// Chain-equivalence classes of oriented `k`-cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub k: i32,
    /// Class of each oriented cell, indexed by [`OrientedIndex::code`].
    pub oriented: Vec<usize>,
    pub num_oriented: usize,
    /// Class of each unoriented cell.
    pub unoriented: Vec<usize>,
    pub num_unoriented: usize,
}

impl Components {
    pub fn class_of(&self, o: OrientedIndex) -> usize {
        self.oriented[o.code()]
    }

    /// Members of each oriented class, as oriented indices.
    pub fn oriented_classes(&self) -> Vec<Vec<OrientedIndex>> {
        let mut out = vec![Vec::new(); self.num_oriented];
        for (code, &c) in self.oriented.iter().enumerate() {
            out[c].push(OrientedIndex::from_code(code));
        }
        out
    }
}

impl SimplicialComplex {
    fn check_sub_top(&self, k: usize) -> Result<()> {
        if k + 1 > self.dim() {
            return Err(Error::DimensionOutOfRange { got: k as i64, lo: 0, hi: self.dim() as i64 - 1 });
        }
        Ok(())
    }

    /// Partitions oriented `k`-cells by chains of up-neighbors, `0 ≤ k ≤ d−1`.
    pub fn k_components(&self, k: usize) -> Result<Components> {
        self.check_sub_top(k)?;
        let j = k as i32;
        let n = self.num_cells(j);
        let mut oriented = UnionFind::new(2 * n);
        let mut unoriented = UnionFind::new(n);
        for i in 0..n {
            for nb in self.up_neighbor_indices(j, i) {
                let me = OrientedIndex::positive(i);
                oriented.union(me.code(), nb.code());
                oriented.union(me.flip().code(), nb.flip().code());
                unoriented.union(i, nb.index);
            }
        }
        let (oriented, num_oriented) = oriented.labels();
        let (unoriented, num_unoriented) = unoriented.labels();
        Ok(Components { k: j, oriented, num_oriented, unoriented, num_unoriented })
    }

    /// Whether the `k`-cells form a single component once orientation is forgotten.
    pub fn is_k_connected(&self, k: usize) -> Result<bool> {
        Ok(self.k_components(k)?.num_unoriented == 1)
    }

    /// Orientation signs on the `(k+1)`-cells such that any two meeting in a
    /// `k`-cell induce the same orientation on it, if such a choice exists.
    pub fn find_disorientation(&self, k: usize) -> Result<Option<Vec<Sign>>> {
        self.check_sub_top(k)?;
        let cells: Vec<usize> = (0..self.num_cells(k as i32 + 1)).collect();
        Ok(self.solve_disorientation(k as i32, &cells))
    }

    /// For each unoriented `(d−1)`-component, whether it contains a `d`-cell and
    /// admits a disorientation.
    pub fn disorientable_components(&self) -> Result<Vec<bool>> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::DimensionOutOfRange { got: 0, lo: 1, hi: i64::MAX });
        }
        let comps = self.k_components(d - 1)?;
        let mut members = vec![Vec::new(); comps.num_unoriented];
        let top = d as i32;
        for t in 0..self.num_cells(top) {
            let f = self.faces_of(top, t)[0] as usize;
            members[comps.unoriented[f]].push(t);
        }
        Ok(members
            .iter()
            .map(|m| !m.is_empty() && self.solve_disorientation(top - 1, m).is_some())
            .collect())
    }

    /// Parity propagation: for `τ, τ′` sharing a `k`-cell at positions `a, b`,
    /// require `x_τ (−1)^a = x_τ′ (−1)^b`.
    fn solve_disorientation(&self, k: i32, cells: &[usize]) -> Option<Vec<Sign>> {
        let n_up = self.num_cells(k + 1);
        let mut x: Vec<Sign> = vec![0; n_up];
        let mut active = vec![false; n_up];
        for &t in cells {
            active[t] = true;
        }
        let mut queue = VecDeque::new();
        for &start in cells {
            if x[start] != 0 {
                continue;
            }
            x[start] = 1;
            queue.push_back(start);
            while let Some(t) = queue.pop_front() {
                for (a, &s) in self.faces_of(k + 1, t).iter().enumerate() {
                    let induced = x[t] * alternating(a);
                    for &u in self.cofaces_of(k, s as usize) {
                        let u = u as usize;
                        if u == t || !active[u] {
                            continue;
                        }
                        let b = self.face_position(k, s as usize, u);
                        let want = induced * alternating(b);
                        if x[u] == 0 {
                            x[u] = want;
                            queue.push_back(u);
                        } else if x[u] != want {
                            return None;
                        }
                    }
                }
            }
        }
        Some(cells.iter().map(|&t| x[t]).collect())
    }
}
