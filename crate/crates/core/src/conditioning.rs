//! Condition numbers of the basis transforms and coefficient diagnostics.
//!
//! `kappa_h` is the 2-norm condition number of the whole parent transform
//! `S_k`, `k = ⌊log_s N⌋`, which is why rows sharing a parent share a value.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::cheb::{
    build_s_matrix, build_s_matrix_general, chebyshev_to_hierarchical, legendre_to_monomial_matrix, parent_level,
    ChebExpansion, LegendreExpansion,
};
use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;

/// Singular values below this fraction of the largest count as zero.
pub const SINGULAR_RATIO: f64 = 1e-300;

/// `σ_max / σ_min`; `f64::INFINITY` for a numerically singular matrix.
pub fn condition_number(m: &Matrix) -> Result<f64> {
    if m.rows() != m.cols() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() == 0 {
        return Err(invalid("empty matrix"));
    }
    if m.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let d = DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let sv = d.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= SINGULAR_RATIO * max {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondRow {
    pub s: usize,
    pub n: usize,
    /// Only reported by [`cond_table_s2`].
    pub kappa_b: Option<f64>,
    pub kappa_h: f64,
}

/// Caches `κ(S_k)` per `(s, k)`; rows with the same parent reuse it.
#[derive(Debug, Default)]
struct ParentCache(BTreeMap<(usize, u32), f64>);

impl ParentCache {
    fn kappa(&mut self, s: usize, n: usize) -> Result<f64> {
        let k = parent_level(n, s);
        if let Some(v) = self.0.get(&(s, k)) {
            return Ok(*v);
        }
        let m = if s == 2 { build_s_matrix(k) } else { build_s_matrix_general(s, k)? };
        let v = condition_number(&m.matrix)?;
        self.0.insert((s, k), v);
        Ok(v)
    }
}

fn check_degree(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("condition tables need N >= 1"));
    }
    Ok(())
}

/// `κ(B_N)` and `κ(H_N)` for `s = 2`.
pub fn cond_table_s2(ns: &[usize]) -> Result<Vec<CondRow>> {
    let mut cache = ParentCache::default();
    ns.iter()
        .map(|&n| {
            check_degree(n)?;
            let b = legendre_to_monomial_matrix(n);
            Ok(CondRow { s: 2, n, kappa_b: Some(condition_number(&b.matrix)?), kappa_h: cache.kappa(2, n)? })
        })
        .collect()
}

/// `κ(H_N)` for every `(s, N)` pair, rows ordered by `s` then `N`.
pub fn cond_table_general_s(s_values: &[usize], ns: &[usize]) -> Result<Vec<CondRow>> {
    let mut cache = ParentCache::default();
    let mut rows = Vec::with_capacity(s_values.len() * ns.len());
    for &s in s_values {
        if s < 2 {
            return Err(invalid(format!("section s = {s} must be at least 2")));
        }
        for &n in ns {
            check_degree(n)?;
            rows.push(CondRow { s, n, kappa_b: None, kappa_h: cache.kappa(s, n)? });
        }
    }
    Ok(rows)
}

/// One function in four bases, all of degree `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientReport {
    pub legendre: Vec<f64>,
    pub monomial: Vec<f64>,
    pub chebyshev: Vec<f64>,
    /// Hierarchical Chebyshev coefficients, `s = 2`.
    pub hierarchical: Vec<f64>,
}

/// Legendre projection (and its power series) next to the Chebyshev
/// interpolant (and its hierarchical form).
pub fn coefficient_magnitudes<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<CoefficientReport> {
    let legendre = LegendreExpansion::project(&f, n)?;
    let monomial = legendre.to_monomial().coeffs().to_vec();
    let cheb = ChebExpansion::interpolate(&f, n)?;
    let hierarchical = chebyshev_to_hierarchical(&cheb, 2)?.coeffs().to_vec();
    Ok(CoefficientReport {
        legendre: legendre.coeffs().to_vec(),
        monomial,
        chebyshev: cheb.into_coeffs(),
        hierarchical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn small_matrices() {
        assert_eq!(condition_number(&Matrix::identity(3)).unwrap(), 1.0);
        let d = Matrix::from_rows(&[alloc::vec![1.0, 0.0], alloc::vec![0.0, 2.0]]).unwrap();
        assert!(rel(condition_number(&d).unwrap(), 2.0) < 1e-14);
        let z = Matrix::zeros(2, 2);
        assert_eq!(condition_number(&z).unwrap(), f64::INFINITY);
        assert!(matches!(condition_number(&Matrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn table_one_h_column() {
        let rows = cond_table_s2(&[10, 20, 30, 40]).unwrap();
        let want = [12.34, 25.55, 25.55, 52.28];
        for (r, w) in rows.iter().zip(want) {
            assert!(rel(r.kappa_h, w) < 0.01, "N={} kappa_h={}", r.n, r.kappa_h);
        }
        assert!(rel(rows[0].kappa_b.unwrap(), 875.0) < 0.01);
    }

    #[test]
    fn shared_parents_share_values() {
        let rows = cond_table_general_s(&[3], &[100, 200]).unwrap();
        assert_eq!(rows[0].kappa_h, rows[1].kappa_h);
        assert!(cond_table_s2(&[0]).is_err());
    }

    #[test]
    fn degree_one_bases_coincide() {
        let r = coefficient_magnitudes(|x| x, 1).unwrap();
        for v in [&r.legendre, &r.monomial, &r.chebyshev, &r.hierarchical] {
            assert!(v[0].abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14, "{v:?}");
        }
    }
}
