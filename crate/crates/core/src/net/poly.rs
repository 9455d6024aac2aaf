//! Constants for the one-hidden-layer polynomial identities of `σ_s`.
//!
//! Any polynomial of degree `≤ s` in `z` is `bias + Σ_i λ_i (z + c_i)^s`, and
//! each `(z + c)^s = σ_s(z + c) + (-1)^s σ_s(-z - c)` costs two units.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::num::powi;

/// `0, 1, -1, 2, -2, …` (first `n` terms).
pub(crate) fn shift_sequence(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let m = i.div_ceil(2) as f64;
            match i {
                0 => 0.0,
                _ if i % 2 == 1 => m,
                _ => -m,
            }
        })
        .collect()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PowerSum {
    pub shifts: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub bias: f64,
}

/// Weights realizing `Σ_{j ≤ s} p_j z^j` as a sum of shifted `s`-th powers.
pub(crate) fn power_sum(s: u32, p: &[f64]) -> PowerSum {
    let n = s as usize;
    debug_assert!(p.len() <= n + 1);
    let coeff = |j: usize| p.get(j).copied().unwrap_or(0.0);
    let shifts = shift_sequence(n);
    // row j-1: coefficient of z^j in (z + c_i)^s
    let m = DMatrix::from_fn(n, n, |r, i| {
        let j = (r + 1) as u32;
        binomial(s, j) * powi(shifts[i], s - j)
    });
    let rhs = DVector::from_fn(n, |r, _| coeff(r + 1));
    let lambdas: Vec<f64> =
        m.lu().solve(&rhs).expect("distinct shifts give a nonsingular system").iter().copied().collect();
    let bias = coeff(0) - lambdas.iter().zip(&shifts).map(|(l, c)| l * powi(*c, s)).sum::<f64>();
    PowerSum { shifts, lambdas, bias }
}

/// `(b_i, μ_i)` with `Σ_i μ_i b_i^β = δ_{β1}` for `β = 0..=t+1`, so that
/// `v^t y = (1/(t+1)) Σ_i μ_i (v + b_i y)^{t+1}`.
pub(crate) fn mixed_weights(t: u32) -> (Vec<f64>, Vec<f64>) {
    let n = t as usize + 2;
    let b = shift_sequence(n);
    let m = DMatrix::from_fn(n, n, |beta, i| powi(b[i], beta as u32));
    let rhs = DVector::from_fn(n, |beta, _| if beta == 1 { 1.0 } else { 0.0 });
    let mu = m.lu().solve(&rhs).expect("distinct nodes give a nonsingular system");
    (b, mu.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_power_sum(ps: &PowerSum, s: u32, z: f64) -> f64 {
        ps.bias + ps.lambdas.iter().zip(&ps.shifts).map(|(l, c)| l * powi(z + c, s)).sum::<f64>()
    }

    #[test]
    fn shifts() {
        assert_eq!(shift_sequence(5), alloc::vec![0.0, 1.0, -1.0, 2.0, -2.0]);
    }

    #[test]
    fn power_sums_reproduce_polynomials() {
        for s in 2..=6u32 {
            let p: Vec<f64> = (0..=s).map(|j| 0.3 * j as f64 - 1.0).collect();
            let ps = power_sum(s, &p);
            for z in [-1.7, -0.2, 0.0, 0.9, 2.4] {
                let want: f64 = p.iter().enumerate().map(|(j, c)| c * powi(z, j as u32)).sum();
                let got = eval_power_sum(&ps, s, z);
                assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "s={s} z={z}");
            }
        }
    }

    #[test]
    fn mixed_weights_reproduce_products() {
        for t in 1..=5u32 {
            let (b, mu) = mixed_weights(t);
            let (v, y) = (0.7, -1.3);
            let got: f64 = b.iter().zip(&mu).map(|(bi, m)| m * powi(v + bi * y, t + 1)).sum::<f64>() / (t + 1) as f64;
            assert!((got - powi(v, t) * y).abs() < 1e-12);
        }
    }
}
