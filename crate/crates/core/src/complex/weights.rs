use alloc::vec::Vec;

use super::SimplicialComplex;
use crate::error::{Error, Result};

/// Strictly positive weights on every cell, stored per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFunction {
    values: Vec<Vec<f64>>,
}

impl WeightFunction {
    pub fn uniform(x: &SimplicialComplex, value: f64) -> Result<Self> {
        Self::from_fn(x, |_, _| value)
    }

    /// Builds weights from `f(j, index)`.
    pub fn from_fn(x: &SimplicialComplex, f: impl Fn(i32, usize) -> f64) -> Result<Self> {
        let values = (-1..=x.dim() as i32)
            .map(|j| (0..x.num_cells(j)).map(|i| f(j, i)).collect::<Vec<f64>>())
            .collect::<Vec<_>>();
        if let Some(&bad) = values.iter().flatten().find(|&&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::NonPositiveWeight(bad));
        }
        Ok(WeightFunction { values })
    }

    /// `deg(σ)` on `(d−1)`-cells and 1 elsewhere.
    pub fn up(x: &SimplicialComplex) -> Result<Self> {
        x.require_positive_degrees()?;
        let top = x.dim() as i32 - 1;
        Self::from_fn(x, |j, i| if j == top { x.degree(j, i) as f64 } else { 1.0 })
    }

    /// `1/(d+1)` on `d`-cells and 1 elsewhere.
    pub fn down(x: &SimplicialComplex) -> Result<Self> {
        let d = x.dim() as i32;
        let v = 1.0 / (x.dim() as f64 + 1.0);
        Self::from_fn(x, |j, _| if j == d { v } else { 1.0 })
    }

    pub fn get(&self, j: i32, index: usize) -> f64 {
        self.values[(j + 1) as usize][index]
    }

    /// Weights of all `j`-cells.
    pub fn level(&self, j: i32) -> &[f64] {
        &self.values[(j + 1) as usize]
    }
}

/// `sup_{σ ∈ X^{k−1}} (1/w(σ)) Σ_{τ ⊃ σ} w(τ)`; always finite on a finite complex.
pub fn is_k_good(x: &SimplicialComplex, w: &WeightFunction, k: usize) -> Result<(bool, f64)> {
    if k > x.dim() {
        return Err(Error::DimensionOutOfRange { got: k as i64, lo: 0, hi: x.dim() as i64 });
    }
    let j = k as i32 - 1;
    let sup = (0..x.num_cells(j))
        .map(|s| x.cofaces_of(j, s).iter().map(|&t| w.get(j + 1, t as usize)).sum::<f64>() / w.get(j, s))
        .fold(0.0, f64::max);
    Ok((sup.is_finite(), sup))
}
