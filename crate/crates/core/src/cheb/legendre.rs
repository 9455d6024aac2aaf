use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::cheb::transform::{TransformKind, TransformMatrix};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest degree for which `B_N` is assembled from exact integer binomials.
/// Row `2N` of Pascal's triangle must fit in `u128`.
pub const EXACT_LEGENDRE_MAX_DEGREE: usize = 64;

/// `f(x) ≈ Σ a_j L_j(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreExpansion {
    coeffs: Vec<f64>,
}

/// `f(x) ≈ Σ ã_j x^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialExpansion {
    coeffs: Vec<f64>,
}

impl LegendreExpansion {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        Ok(LegendreExpansion { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (mut prev, mut cur) = (0.0, 1.0);
        let mut acc = 0.0;
        for (j, &a) in self.coeffs.iter().enumerate() {
            acc += a * cur;
            let jf = j as f64;
            let next = ((2.0 * jf + 1.0) * x * cur - jf * prev) / (jf + 1.0);
            prev = cur;
            cur = next;
        }
        acc
    }

    /// L² projection `a_j = (2j+1)/2 ∫ f L_j` with `2n + 2` Gauss–Legendre nodes.
    pub fn project<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<Self> {
        Self::project_with_nodes(f, n, 2 * n + 2)
    }

    pub fn project_with_nodes<F: Fn(f64) -> f64>(f: F, n: usize, nodes: usize) -> Result<Self> {
        if nodes < n + 1 {
            return Err(Error::InvalidArgument(alloc::format!("{nodes} quadrature nodes cannot resolve degree {n}")));
        }
        let (xs, ws) = gauss_legendre(nodes);
        let mut coeffs = vec![0.0; n + 1];
        for (&x, &w) in xs.iter().zip(&ws) {
            let fx = f(x);
            if !fx.is_finite() {
                return Err(Error::NonFinite(alloc::format!("function sample at x = {x}")));
            }
            for (j, l) in legendre_table(n, x).into_iter().enumerate() {
                coeffs[j] += w * fx * l;
            }
        }
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c *= (2 * j + 1) as f64 / 2.0;
        }
        Ok(LegendreExpansion { coeffs })
    }

    /// `ã = B_N a`.
    pub fn to_monomial(&self) -> MonomialExpansion {
        let b = legendre_to_monomial_matrix(self.degree());
        MonomialExpansion { coeffs: b.matrix.mul_vec(&self.coeffs) }
    }
}

impl MonomialExpansion {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        Ok(MonomialExpansion { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// `[L_0(x), …, L_n(x)]`.
pub fn legendre_table(n: usize, x: f64) -> Vec<f64> {
    let mut l = Vec::with_capacity(n + 1);
    l.push(1.0);
    if n >= 1 {
        l.push(x);
    }
    for k in 1..n {
        let kf = k as f64;
        l.push(((2.0 * kf + 1.0) * x * l[k] - kf * l[k - 1]) / (kf + 1.0));
    }
    l
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton on `L_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// `B_N`: column `j` holds the monomial coefficients of `L_j`.
///
/// Up to [`EXACT_LEGENDRE_MAX_DEGREE`] the entries come from the closed form
/// `(-1)^i C(j,i) C(2j-2i,j) / 2^j` with exact integer binomials; beyond that
/// the three-term recurrence is used in floating point.
pub fn legendre_to_monomial_matrix(n: usize) -> TransformMatrix {
    let matrix =
        if n <= EXACT_LEGENDRE_MAX_DEGREE { legendre_monomial_exact(n) } else { legendre_monomial_recurrence(n) };
    TransformMatrix { kind: TransformKind::LegendreToMonomial { degree: n }, matrix }
}

fn pascal_rows(max_row: usize) -> Vec<Vec<u128>> {
    let mut rows: Vec<Vec<u128>> = Vec::with_capacity(max_row + 1);
    rows.push(vec![1]);
    for r in 1..=max_row {
        let prev = &rows[r - 1];
        let mut row = vec![1u128; r + 1];
        for k in 1..r {
            row[k] = prev[k - 1] + prev[k];
        }
        rows.push(row);
    }
    rows
}

fn legendre_monomial_exact(n: usize) -> Matrix {
    let pascal = pascal_rows(2 * n);
    let mut m = Matrix::zeros(n + 1, n + 1);
    for j in 0..=n {
        let scale = libm::ldexp(1.0, -(j as i32));
        for i in 0..=j / 2 {
            let mag = pascal[j][i] as f64 * pascal[2 * j - 2 * i][j] as f64 * scale;
            m[(j - 2 * i, j)] = if i % 2 == 0 { mag } else { -mag };
        }
    }
    m
}

pub(crate) fn legendre_monomial_recurrence(n: usize) -> Matrix {
    let mut m = Matrix::zeros(n + 1, n + 1);
    m[(0, 0)] = 1.0;
    if n >= 1 {
        m[(1, 1)] = 1.0;
    }
    for k in 1..n {
        let kf = k as f64;
        for i in 0..=k + 1 {
            let shifted = if i >= 1 { m[(i - 1, k)] } else { 0.0 };
            m[(i, k + 1)] = ((2.0 * kf + 1.0) * shifted - kf * m[(i, k - 1)]) / (kf + 1.0);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_of_low_degree_polynomials_is_exact() {
        let a = LegendreExpansion::project(|x| x * x, 2).unwrap();
        let want = [1.0 / 3.0, 0.0, 2.0 / 3.0];
        for (got, want) in a.coeffs().iter().zip(want) {
            assert!((got - want).abs() < 1e-15);
        }
        let a = LegendreExpansion::project(|x| x, 1).unwrap();
        assert!(a.coeffs()[0].abs() < 1e-15 && (a.coeffs()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn to_monomial_small_cases() {
        let m = LegendreExpansion::new(vec![0.0, 0.0, 1.0]).unwrap().to_monomial();
        assert_eq!(m.coeffs(), &[-0.5, 0.0, 1.5]);
        let m = LegendreExpansion::new(vec![1.0, 0.0]).unwrap().to_monomial();
        assert_eq!(m.coeffs(), &[1.0, 0.0]);
    }

    #[test]
    fn exact_and_recurrence_routes_agree() {
        for n in [5, 20, 40, 64] {
            let exact = legendre_monomial_exact(n);
            let rec = legendre_monomial_recurrence(n);
            for j in 0..=n {
                for i in 0..=n {
                    let (e, r) = (exact[(i, j)], rec[(i, j)]);
                    assert!((e - r).abs() <= 1e-12 * e.abs().max(1.0), "n={n} ({i},{j}): {e} vs {r}");
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_integrates_degree_2n_minus_1() {
        let (xs, ws) = gauss_legendre(6);
        let integral: f64 = xs.iter().zip(&ws).map(|(x, w)| w * crate::num::powi(*x, 10)).sum();
        assert!((integral - 2.0 / 11.0).abs() < 1e-15);
        assert!((ws.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn horner_eval() {
        let m = MonomialExpansion::new(vec![1.0, -2.0, 3.0]).unwrap();
        assert_eq!(m.eval(2.0), 9.0);
    }
}
