use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cheb::chebyshev::{chebyshev_table, ChebExpansion};
use crate::error::{invalid, Error, Result};
use crate::num::{ipow, level_for_degree};

/// `p(x) = Σ c̃_j Ĥ_j(x)` where `Ĥ_j = Π_i T_{d_i s^i}` over the base-`s`
/// digits `d_i` of `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchicalChebExpansion {
    coeffs: Vec<f64>,
    section: usize,
}

impl HierarchicalChebExpansion {
    pub fn new(coeffs: Vec<f64>, section: usize) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        check_section(section)?;
        Ok(HierarchicalChebExpansion { coeffs, section })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn section(&self) -> usize {
        self.section
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let table = DigitTable::new(self.degree(), self.section, x);
        self.coeffs.iter().enumerate().map(|(j, c)| c * table.basis(j)).sum()
    }
}

/// `Ĥ_j(x)` from the product definition.
pub fn hierarchical_basis(j: usize, s: usize, x: f64) -> f64 {
    DigitTable::new(j, s, x).basis(j)
}

/// `T_d(T_{s^i}(x))` for every digit `d < s` and level `i`.
struct DigitTable {
    s: usize,
    rows: Vec<Vec<f64>>,
}

impl DigitTable {
    fn new(max_index: usize, s: usize, x: f64) -> Self {
        let levels = if max_index == 0 { 1 } else { level_for_degree(max_index, s) as usize + 1 };
        let mut rows = Vec::with_capacity(levels);
        let mut y = x;
        for _ in 0..levels {
            let row = chebyshev_table(s, y);
            y = row[s];
            rows.push(row);
        }
        DigitTable { s, rows }
    }

    fn basis(&self, mut j: usize) -> f64 {
        let mut acc = 1.0;
        let mut level = 0;
        while j > 0 {
            acc *= self.rows[level][j % self.s];
            j /= self.s;
            level += 1;
        }
        acc
    }
}

fn check_section(s: usize) -> Result<()> {
    if s < 2 {
        return Err(invalid(format!("section s = {s} must be at least 2")));
    }
    Ok(())
}

/// Splits `b` (length `s^{k+1}`, Chebyshev coefficients) into `s` blocks of
/// length `s^k` such that `Σ_j b_j T_j = Σ_l P̃_l · T_l(T_{s^k})` with
/// `P̃_l = Σ_j blocks[l][j] T_j`.
pub fn split_by_section(b: &[f64], s: usize) -> Vec<Vec<f64>> {
    let n = b.len() / s;
    debug_assert_eq!(n * s, b.len());
    let mut blocks = vec![vec![0.0; n]; s];
    for (l, block) in blocks.iter_mut().enumerate() {
        block[0] = b[l * n];
        let scale = if l == 0 { 1.0 } else { 2.0 };
        for (j, slot) in block.iter_mut().enumerate().skip(1) {
            let mut acc = 0.0;
            for r in l..s {
                if (r - l) % 2 == 0 {
                    acc += b[r * n + j];
                } else {
                    acc -= b[(r + 1) * n - j];
                }
            }
            *slot = scale * acc;
        }
    }
    blocks
}

/// Full hierarchical transform of a coefficient vector whose length is a
/// power `s^{k+1}` of the section.
pub(crate) fn hierarchical_coeffs(b: &[f64], s: usize) -> Vec<f64> {
    if b.len() <= s {
        return b.to_vec();
    }
    split_by_section(b, s).iter().flat_map(|block| hierarchical_coeffs(block, s)).collect()
}

/// Chebyshev to hierarchical coefficients: zero-pad to `s^{k+1}`, transform,
/// truncate to the input length.
pub fn chebyshev_to_hierarchical(e: &ChebExpansion, s: usize) -> Result<HierarchicalChebExpansion> {
    check_section(s)?;
    let n = e.degree();
    if n == 0 {
        return HierarchicalChebExpansion::new(e.coeffs().to_vec(), s);
    }
    let order = ipow(s, level_for_degree(n, s) + 1);
    let mut padded = e.coeffs().to_vec();
    padded.resize(order, 0.0);
    let mut out = hierarchical_coeffs(&padded, s);
    debug_assert!(out[n + 1..].iter().all(|v| *v == 0.0));
    out.truncate(n + 1);
    HierarchicalChebExpansion::new(out, s)
}
