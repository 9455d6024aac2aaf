use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Number of Gauss–Chebyshev nodes used for the degree-0 projection.
const MEAN_NODES: usize = 64;

/// `p(x) = Σ c_j T_j(x)`. The trailing coefficient may be zero, so
/// [`degree`](Self::degree) is an upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebExpansion {
    coeffs: Vec<f64>,
}

impl ChebExpansion {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        Ok(ChebExpansion { coeffs })
    }

    /// The single polynomial `T_n`.
    pub fn basis(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        ChebExpansion { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw evaluation; valid on all of ℝ.
    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, x)
    }

    /// Degree-`n` interpolant at the Chebyshev–Gauss–Lobatto points `cos(kπ/n)`.
    ///
    /// For `n = 0` the Lobatto grid degenerates; the constant returned is the
    /// degree-0 Chebyshev projection (the `1/√(1-x²)`-weighted mean of `f`).
    pub fn interpolate<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<Self> {
        if n == 0 {
            let mut acc = 0.0;
            for i in 0..MEAN_NODES {
                let x = libm::cos((2 * i + 1) as f64 * PI / (2 * MEAN_NODES) as f64);
                acc += sample(&f, x)?;
            }
            return Ok(ChebExpansion { coeffs: vec![acc / MEAN_NODES as f64] });
        }
        let values = lobatto_points(n).into_iter().map(|x| sample(&f, x)).collect::<Result<Vec<_>>>()?;
        let two_n = 2 * n;
        let mut coeffs = vec![0.0; n + 1];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, v) in values.iter().enumerate() {
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                // cos(jkπ/n) with the angle reduced mod 2π before scaling
                let phase = (j * k) % two_n;
                acc += w * v * libm::cos(PI * phase as f64 / n as f64);
            }
            let scale = if j == 0 || j == n { 1.0 } else { 2.0 };
            *c = scale * acc / n as f64;
        }
        Ok(ChebExpansion { coeffs })
    }

    /// Monomial coefficients of the same polynomial. Only well conditioned for
    /// small degrees; used for the one-layer gadgets.
    pub fn to_monomial_coeffs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.coeffs.len()];
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (i, t) in chebyshev_monomial_coeffs(j).into_iter().enumerate() {
                out[i] += c * t;
            }
        }
        out
    }
}

fn sample<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(alloc::format!("function sample at x = {x}")))
    }
}

/// Chebyshev–Gauss–Lobatto points `cos(kπ/n)`, `k = 0..=n`.
pub fn lobatto_points(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![1.0];
    }
    (0..=n).map(|k| libm::cos(PI * k as f64 / n as f64)).collect()
}

pub(crate) fn clenshaw(coeffs: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs[1..].iter().rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + x * b1 - b2
}

/// `T_n(x)` by the three-term recurrence.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..n {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `[T_0(x), …, T_n(x)]`.
pub fn chebyshev_table(n: usize, x: f64) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    t.push(1.0);
    if n >= 1 {
        t.push(x);
    }
    for k in 2..=n {
        t.push(2.0 * x * t[k - 1] - t[k - 2]);
    }
    t
}

/// Monomial coefficients of `T_n` (exact integers for moderate `n`).
pub fn chebyshev_monomial_coeffs(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for _ in 1..n {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, p) in prev.iter().enumerate() {
            next[i] -= p;
        }
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clenshaw_small_cases() {
        let e = |c: &[f64]| ChebExpansion::new(c.to_vec()).unwrap();
        assert_eq!(e(&[0.0, 1.0]).eval(0.3), 0.3);
        assert!((e(&[0.0, 0.0, 1.0]).eval(0.5) + 0.5).abs() < 1e-15);
        assert!((e(&[1.0, 2.0, 3.0]).eval(1.0) - 6.0).abs() < 1e-15);
        assert_eq!(e(&[2.5]).eval(7.0), 2.5);
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(ChebExpansion::new(vec![]), Err(Error::EmptyCoefficients));
    }

    #[test]
    fn interpolation_reproduces_t5() {
        let p = ChebExpansion::basis(5);
        let c = ChebExpansion::interpolate(|x| p.eval(x), 8).unwrap();
        for (j, v) in c.coeffs().iter().enumerate() {
            let want = if j == 5 { 1.0 } else { 0.0 };
            assert!((v - want).abs() <= 1e-13, "c_{j} = {v}");
        }
    }

    #[test]
    fn interpolation_of_even_function_has_zero_odd_part() {
        let c = ChebExpansion::interpolate(|x| libm::exp(-x * x), 15).unwrap();
        for v in c.coeffs().iter().skip(1).step_by(2) {
            assert!(v.abs() <= 1e-13);
        }
    }

    #[test]
    fn non_finite_sample_is_an_error() {
        let r = ChebExpansion::interpolate(|x| 1.0 / (x - 1.0), 4);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn monomial_coeffs_of_t4() {
        assert_eq!(chebyshev_monomial_coeffs(4), vec![1.0, 0.0, -8.0, 0.0, 8.0]);
    }

    #[test]
    fn table_matches_recurrence() {
        let t = chebyshev_table(9, 0.37);
        for (n, v) in t.iter().enumerate() {
            assert!((v - chebyshev_t(n, 0.37)).abs() < 1e-15);
        }
    }
}
