use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cheb::hierarchical::hierarchical_coeffs;
use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;
use crate::num::{ipow, level_for_degree};

/// Largest deviation from an integer tolerated in a built `S` matrix.
const INTEGER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    /// `S_m` for `s = 2` from the Kronecker recursion.
    HierarchicalS2 { level: u32 },
    /// `S_k` for section `s`, assembled from the split coefficients.
    HierarchicalGeneral { s: usize, level: u32 },
    /// `B_N`.
    LegendreToMonomial { degree: usize },
    /// `H_N`, the leading `(N+1)×(N+1)` block of `S_k`.
    LeadingBlock { s: usize, level: u32, degree: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    pub kind: TransformKind,
    pub matrix: Matrix,
}

impl TransformMatrix {
    pub fn order(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, c: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(c)
    }
}

/// `S_m` of order `2^{m+1}`:
/// `S_j = (I_2 ⊗ S_{j-1}) [[I, A_j], [0, 2I]]`, `S_0 = I_2`.
pub fn build_s_matrix(m: u32) -> TransformMatrix {
    let mut s = Matrix::identity(2);
    for j in 1..=m {
        let half = ipow(2, j);
        let order = 2 * half;
        let mut r = Matrix::identity(order);
        // columns half+1 .. order-1 carry -J in rows 1..half-1 and 2 on the diagonal
        for col in half + 1..order {
            r[(order - col, col)] = -1.0;
            r[(col, col)] = 2.0;
        }
        s = Matrix::identity(2).kron(&s).matmul(&r);
    }
    TransformMatrix { kind: TransformKind::HierarchicalS2 { level: m }, matrix: s }
}

/// `S_k` for section `s`, order `s^{k+1}`. Column `i` is the hierarchical
/// transform of the `i`-th unit coefficient vector.
pub fn build_s_matrix_general(s: usize, k: u32) -> Result<TransformMatrix> {
    if s < 2 {
        return Err(invalid(format!("section s = {s} must be at least 2")));
    }
    let order = ipow(s, k + 1);
    let mut m = Matrix::zeros(order, order);
    let mut unit = vec![0.0; order];
    for i in 0..order {
        unit[i] = 1.0;
        for (row, v) in hierarchical_coeffs(&unit, s).into_iter().enumerate() {
            m[(row, i)] = v;
        }
        unit[i] = 0.0;
    }
    round_integer_entries(&mut m)?;
    Ok(TransformMatrix { kind: TransformKind::HierarchicalGeneral { s, level: k }, matrix: m })
}

/// Level `k` of the parent transform for degree `n`: smallest `k` with `s^{k+1} > n`.
pub fn parent_level(n: usize, s: usize) -> u32 {
    level_for_degree(n, s)
}

/// `H_N` for section `s`: the leading block of `S_k`, `k = parent_level(N, s)`.
pub fn h_matrix(s: usize, n: usize) -> Result<TransformMatrix> {
    let level = parent_level(n, s);
    let parent = if s == 2 { build_s_matrix(level) } else { build_s_matrix_general(s, level)? };
    Ok(TransformMatrix {
        kind: TransformKind::LeadingBlock { s, level, degree: n },
        matrix: parent.matrix.leading_block(n + 1, n + 1),
    })
}

fn round_integer_entries(m: &mut Matrix) -> Result<()> {
    for v in m.as_mut_slice() {
        let r = libm::round(*v);
        if (*v - r).abs() > INTEGER_TOLERANCE {
            return Err(Error::NonFinite(format!("non-integer transform entry {v}")));
        }
        *v = r;
    }
    Ok(())
}
