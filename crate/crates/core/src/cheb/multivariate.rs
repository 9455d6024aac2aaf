use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::cheb::chebyshev::{chebyshev_table, ChebExpansion};
use crate::cheb::hierarchical::{chebyshev_to_hierarchical, hierarchical_basis};
use crate::error::{Error, Result};
use crate::index_set::IndexSet;

/// `p(x) = Σ_{k ∈ Λ} c_k Π_i T_{k_i}(x_i)` over an index set `Λ`.
///
/// Indices of `Λ` missing from the coefficient map have coefficient zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiChebExpansion {
    index_set: IndexSet,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

impl MultiChebExpansion {
    pub fn new(index_set: IndexSet, coeffs: BTreeMap<Vec<usize>, f64>) -> Result<Self> {
        for k in coeffs.keys() {
            if k.len() != index_set.dim() {
                return Err(Error::DimensionMismatch { expected: index_set.dim(), found: k.len() });
            }
            if !index_set.contains(k) {
                return Err(Error::InvalidArgument(alloc::format!("coefficient index {k:?} is not in the index set")));
            }
        }
        Ok(MultiChebExpansion { index_set, coeffs })
    }

    /// Builds the expansion from a coefficient function evaluated on every index.
    pub fn from_fn(index_set: IndexSet, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let coeffs = index_set.iter().map(|k| (k.clone(), f(k))).collect();
        MultiChebExpansion { index_set, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.index_set.dim()
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: &[usize]) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Direct sum with per-coordinate Chebyshev tables.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x.len() });
        }
        let tables: Vec<Vec<f64>> = (0..d).map(|i| chebyshev_table(self.index_set.max_degree(i), x[i])).collect();
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| c * k.iter().enumerate().map(|(i, &ki)| tables[i][ki]).product::<f64>())
            .sum())
    }

    /// Applies the 1D hierarchical transform (`s = 2`) along every coordinate.
    ///
    /// For a downward-closed set every fiber is a prefix `0..=m`, so the
    /// transform stays inside the index set.
    pub fn to_hierarchical(&self) -> Result<MultiChebExpansion> {
        if !self.index_set.is_downward_closed() {
            return Err(Error::NotDownwardClosed);
        }
        let mut coeffs: BTreeMap<Vec<usize>, f64> = self.index_set.iter().map(|k| (k.clone(), self.coeff(k))).collect();
        for axis in 0..self.dim() {
            let mut fibers: BTreeMap<Vec<usize>, Vec<f64>> = BTreeMap::new();
            for (k, &c) in &coeffs {
                let mut rest = k.clone();
                let pos = rest.remove(axis);
                let fiber = fibers.entry(rest).or_default();
                if fiber.len() <= pos {
                    fiber.resize(pos + 1, 0.0);
                }
                fiber[pos] = c;
            }
            for (rest, fiber) in fibers {
                let h = chebyshev_to_hierarchical(&ChebExpansion::new(fiber)?, 2)?;
                for (pos, &v) in h.coeffs().iter().enumerate() {
                    let mut k = rest.clone();
                    k.insert(axis, pos);
                    coeffs.insert(k, v);
                }
            }
        }
        Ok(MultiChebExpansion { index_set: self.index_set.clone(), coeffs })
    }

    /// Evaluates coefficients over the hierarchical product basis `Π_i Ĥ_{k_i}(x_i)`.
    pub fn eval_hierarchical(&self, x: &[f64]) -> Result<f64> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: x.len() });
        }
        let tables: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..=self.index_set.max_degree(i)).map(|j| hierarchical_basis(j, 2, x[i])).collect())
            .collect();
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| c * k.iter().enumerate().map(|(i, &ki)| tables[i][ki]).product::<f64>())
            .sum())
    }
}
