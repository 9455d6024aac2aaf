//! Small exact `σ_2` (and `σ_s`) networks.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::net::circuit::{Circuit, Signal};
use crate::net::network::{Layer, RepuNetwork};

/// Constants of the one-layer `σ_2` identities
/// `x = β₁ᵀσ₂(ω₁x + γ₁)`, `x² = β₂ᵀσ₂(ω₂x)`, `xy = β₁ᵀσ₂(ω₁x + γ₁y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Constants {
    pub beta1: [f64; 4],
    pub beta2: [f64; 2],
    pub omega1: [f64; 4],
    pub omega2: [f64; 2],
    pub gamma1: [f64; 4],
}

impl Lemma2Constants {
    pub const fn new() -> Self {
        Lemma2Constants {
            beta1: [0.25, 0.25, -0.25, -0.25],
            beta2: [1.0, 1.0],
            omega1: [1.0, -1.0, 1.0, -1.0],
            omega2: [1.0, -1.0],
            gamma1: [1.0, -1.0, -1.0, 1.0],
        }
    }
}

impl Default for Lemma2Constants {
    fn default() -> Self {
        Self::new()
    }
}

fn column(v: &[f64]) -> Matrix {
    Matrix::from_row_major(v.len(), 1, v.to_vec()).expect("column shape")
}

fn row(v: &[f64]) -> Matrix {
    Matrix::from_row_major(1, v.len(), v.to_vec()).expect("row shape")
}

fn two_layer(input_dim: usize, w1: Matrix, b1: Vec<f64>, w2: Matrix, b2: f64) -> RepuNetwork {
    let layers = vec![Layer { weights: w1, bias: b1 }, Layer { weights: w2, bias: vec![b2] }];
    RepuNetwork::new(2, input_dim, layers).expect("gadget shapes chain")
}

/// `x ↦ x` with four units.
pub fn identity_net() -> RepuNetwork {
    let c = Lemma2Constants::new();
    two_layer(1, column(&c.omega1), c.gamma1.to_vec(), row(&c.beta1), 0.0)
}

/// `x ↦ x²` with two units.
pub fn square_net() -> RepuNetwork {
    let c = Lemma2Constants::new();
    two_layer(1, column(&c.omega2), vec![0.0; 2], row(&c.beta2), 0.0)
}

/// `(x, y) ↦ xy` with four units.
pub fn product_net() -> RepuNetwork {
    let c = Lemma2Constants::new();
    let mut w = Matrix::zeros(4, 2);
    for i in 0..4 {
        w[(i, 0)] = c.omega1[i];
        w[(i, 1)] = c.gamma1[i];
    }
    two_layer(2, w, vec![0.0; 4], row(&c.beta1), 0.0)
}

/// `x ↦ T_2(x) = 2β₂ᵀσ₂(ω₂x) − 1`.
pub fn t2_net() -> RepuNetwork {
    let c = Lemma2Constants::new();
    let beta: Vec<f64> = c.beta2.iter().map(|b| 2.0 * b).collect();
    two_layer(1, column(&c.omega2), vec![0.0; 2], row(&beta), -1.0)
}

/// `x ↦ T_1(x) = x`, the identity network under its Chebyshev name.
pub fn t1_net() -> RepuNetwork {
    identity_net()
}

/// `depth` hidden layers computing `x ↦ x` exactly.
pub fn identity_carry(depth: usize, s: u32) -> RepuNetwork {
    assert!(depth >= 1, "an identity carry needs at least one layer");
    let mut c = Circuit::new(s, 1);
    let x = c.input(0);
    let out = c.lift(&x, depth);
    c.finish(&[out])
}

/// Which repeated squaring the chain performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    /// `T_{2^k} = 2 T_{2^{k-1}}² − 1`.
    Chebyshev,
    /// `x^{2^k} = (x^{2^{k-1}})²`.
    Power,
}

/// `m` hidden layers computing `T_{2^m}(x)` or `x^{2^m}`.
pub fn squaring_chain(m: usize, kind: ChainKind) -> RepuNetwork {
    let mut c = Circuit::new(2, 1);
    let mut cur = c.input(0);
    for _ in 0..m {
        cur = chain_step(&mut c, &cur, kind);
    }
    c.finish(&[cur])
}

pub(crate) fn chain_step(c: &mut Circuit, prev: &Signal, kind: ChainKind) -> Signal {
    let sq = c.square(prev);
    match kind {
        ChainKind::Chebyshev => {
            let t = c.combine(&[(2.0, &sq)], -1.0);
            c.with_bound(&t, 1.0)
        }
        ChainKind::Power => sq,
    }
}
