//! The splitting identity `T_{rs+k}` as a sum of products of lower-degree
//! Chebyshev polynomials.

use alloc::format;
use alloc::vec::Vec;

use crate::cheb::chebyshev::{chebyshev_t, ChebExpansion};
use crate::error::{invalid, Result};

/// `coeff · T_left · T_right`; `right = 0` gives a single factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductTerm {
    pub coeff: f64,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProductSum {
    pub terms: Vec<ProductTerm>,
}

impl ProductSum {
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.coeff * chebyshev_t(t.left, x) * chebyshev_t(t.right, x)).sum()
    }

    fn push(&mut self, coeff: f64, left: usize, right: usize) {
        if coeff != 0.0 {
            self.terms.push(ProductTerm { coeff, left, right });
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChebIdentity {
    pub lhs: ChebExpansion,
    pub rhs: ProductSum,
}

/// Both sides of
/// `T_{rs+k} = 2 Σ_{i=1}^{r} δ⁻_{r-i} [T_{is} T_k − T_{(i-1)s} T_{s-k}] + δ⁺_r T_{s-k} + δ⁻_r T_k`
/// where `δ⁻_r` is 1 for even `r` and `δ⁺_r` is 1 for odd `r`.
pub fn cheb_expand_t(r: usize, s: usize, k: usize) -> Result<ChebIdentity> {
    if r < 1 {
        return Err(invalid("r must be at least 1"));
    }
    if s < 2 {
        return Err(invalid(format!("section s = {s} must be at least 2")));
    }
    if k < 1 || k >= s {
        return Err(invalid(format!("k = {k} outside 1..{}", s - 1)));
    }
    let even = |m: usize| m % 2 == 0;
    let mut rhs = ProductSum::default();
    for i in 1..=r {
        if even(r - i) {
            rhs.push(2.0, i * s, k);
            rhs.push(-2.0, (i - 1) * s, s - k);
        }
    }
    if even(r) {
        rhs.push(1.0, k, 0);
    } else {
        rhs.push(1.0, s - k, 0);
    }
    Ok(ChebIdentity { lhs: ChebExpansion::basis(r * s + k), rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn r1_s3_k1_is_2t3t1_minus_t2() {
        let id = cheb_expand_t(1, 3, 1).unwrap();
        assert_eq!(id.lhs, ChebExpansion::basis(4));
        assert_eq!(
            id.rhs.terms,
            vec![
                ProductTerm { coeff: 2.0, left: 3, right: 1 },
                ProductTerm { coeff: -2.0, left: 0, right: 2 },
                ProductTerm { coeff: 1.0, left: 2, right: 0 },
            ]
        );
    }

    #[test]
    fn both_sides_agree() {
        for (r, s, k) in [(2, 2, 1), (3, 4, 2), (5, 3, 2)] {
            let id = cheb_expand_t(r, s, k).unwrap();
            for i in 0..50 {
                let x = -1.0 + 2.0 * i as f64 / 49.0;
                assert!((id.lhs.eval(x) - id.rhs.eval(x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn k_out_of_range_rejected() {
        assert!(cheb_expand_t(1, 3, 0).is_err());
        assert!(cheb_expand_t(1, 3, 3).is_err());
    }
}
