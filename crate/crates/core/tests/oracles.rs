//! Frozen reference values. Each constant was fixed before the code that
//! reproduces it and must not be edited to make a test pass.

use chebnet_core::cheb::{chebyshev_t, legendre_to_monomial_matrix, ChebExpansion, LegendreExpansion};
use chebnet_core::conditioning::{cond_table_general_s, cond_table_s2, condition_number};
use chebnet_core::construct::build_chebnet_1d;
use chebnet_core::net::gadgets::{identity_net, product_net, square_net, t2_net};
use chebnet_core::train::{rmsprop_step, test_function, RmsPropState, TestFunction, TrainConfig};
use chebnet_core::Matrix;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// κ(H_N), s = 2, N = 10, 20, 30, 40.
const KAPPA_H_S2: [(usize, f64); 4] = [(10, 1.234e1), (20, 2.555e1), (30, 2.555e1), (40, 5.228e1)];
/// κ(B_N), N = 10, 20, 30.
const KAPPA_B: [(usize, f64); 3] = [(10, 8.750e2), (20, 4.1e6), (30, 2.2e10)];
const KAPPA_B_40: f64 = 1.3e14;

/// κ(H_N) for N = 10, 50, 100, 200, 500, rows s = 2..6.
const KAPPA_H_TABLE: [[f64; 5]; 5] = [
    [1.234e1, 5.228e1, 1.062e2, 2.150e2, 4.338e2],
    [1.371e1, 4.432e1, 1.415e2, 1.415e2, 4.493e2],
    [6.008, 3.285e1, 1.772e2, 1.772e2, 9.538e2],
    [9.1002, 6.582e1, 6.582e1, 4.714e2, 4.714e2],
    [1.22e1, 1.102e2, 1.102e2, 1.102e2, 1.029e3],
];
const TABLE_NS: [usize; 5] = [10, 50, 100, 200, 500];

#[test]
fn table_one_hierarchical() {
    let ns: Vec<usize> = KAPPA_H_S2.iter().map(|r| r.0).collect();
    let rows = cond_table_s2(&ns).unwrap();
    for ((n, want), row) in KAPPA_H_S2.iter().zip(&rows) {
        assert_eq!(row.n, *n);
        assert!(rel(row.kappa_h, *want) <= 0.02, "N={n}: {} vs {want}", row.kappa_h);
    }
}

#[test]
fn table_one_legendre_to_monomial() {
    for (n, want) in KAPPA_B {
        let k = condition_number(&legendre_to_monomial_matrix(n).matrix).unwrap();
        assert!(rel(k, want) <= 0.10, "N={n}: {k} vs {want}");
    }
    let k40 = condition_number(&legendre_to_monomial_matrix(40).matrix).unwrap();
    assert!(k40 / KAPPA_B_40 <= 3.0 && KAPPA_B_40 / k40 <= 3.0, "{k40}");
}

#[test]
fn table_two_rows_two_and_three() {
    // rows s = 4, 5, 6 are exercised by the acceptance suite
    for s in [2, 3] {
        let rows = cond_table_general_s(&[s], &TABLE_NS).unwrap();
        for (row, want) in rows.iter().zip(KAPPA_H_TABLE[s - 2]) {
            assert!(rel(row.kappa_h, want) <= 0.02, "s={s} N={}: {} vs {want}", row.n, row.kappa_h);
        }
    }
}

#[test]
fn table_two_repeats_share_a_parent() {
    let rows = cond_table_general_s(&[3], &[100, 200]).unwrap();
    assert_eq!(rows[0].kappa_h, rows[1].kappa_h);
}

#[test]
fn identity_matrix_is_perfectly_conditioned() {
    assert_eq!(condition_number(&Matrix::identity(7)).unwrap(), 1.0);
}

#[test]
fn lemma_two_gadgets_at_fixed_points() {
    assert_eq!(identity_net().eval1(-0.7).unwrap(), -0.7);
    assert_eq!(square_net().eval1(0.5).unwrap(), 0.25);
    assert_eq!(product_net().forward(&[0.5, -0.25]).unwrap()[0], -0.125);
    assert_eq!(t2_net().eval1(0.5).unwrap(), -0.5);
}

#[test]
fn degree_fifteen_chebnet_has_depth_four() {
    let e = ChebExpansion::interpolate(|x| (-x * x).exp(), 15).unwrap();
    let r = build_chebnet_1d(&e).unwrap();
    assert_eq!(r.network.hidden_layers(), 4);
}

#[test]
fn rmsprop_hand_evaluated_steps() {
    let cfg = TrainConfig::default();
    let mut p = [0.0];
    let mut st = RmsPropState::new(1);
    rmsprop_step(&mut p, &[1.0], &mut st, &cfg).unwrap();
    // 1e-5 / sqrt(0.01 + 1e-8)
    assert!((p[0] + 9.999995e-5).abs() < 1e-12, "{}", p[0]);
    assert!((st.v[0] - 0.01).abs() < 1e-15);
    let before = p[0];
    rmsprop_step(&mut p, &[1.0], &mut st, &cfg).unwrap();
    assert!((st.v[0] - 0.0199).abs() < 1e-15);
    let step = 1e-5 / (0.0199f64 + 1e-8).sqrt();
    assert!((before - p[0] - step).abs() < 1e-15);
}

#[test]
fn test_functions() {
    let f1 = test_function("f1").unwrap();
    let f2 = test_function("f2").unwrap();
    assert_eq!(f1, TestFunction::F1);
    assert_eq!(f1.eval(0.0), 1.0);
    assert_eq!(f2.eval(0.0), 0.0);
    assert!((f2.eval(1.0) - 0.367879).abs() < 1e-6);
    assert!(test_function("f3").is_err());
}

#[test]
fn chebyshev_values() {
    assert_eq!(chebyshev_t(4, 0.5), -0.5);
    assert_eq!(chebyshev_t(0, 0.3), 1.0);
    assert!((chebyshev_t(3, 0.5) + 1.0).abs() < 1e-15);
}

#[test]
fn legendre_of_a_polynomial_is_exact() {
    // x^2 = (1/3) P_0 + (2/3) P_2
    let e = LegendreExpansion::project(|x| x * x, 2).unwrap();
    let c = e.coeffs();
    assert!((c[0] - 1.0 / 3.0).abs() < 1e-14 && c[1].abs() < 1e-14 && (c[2] - 2.0 / 3.0).abs() < 1e-14);
}
