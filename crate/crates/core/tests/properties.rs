use chebnet_core::cheb::{chebyshev_t, chebyshev_to_hierarchical, ChebExpansion, LegendreExpansion};
use chebnet_core::conditioning::condition_number;
use chebnet_core::construct::{build_chebnet_1d, build_chebnet_1d_general};
use chebnet_core::net::{Layer, RepuNetwork};
use chebnet_core::train::{loss_mse, train, Dataset, TrainConfig};
use chebnet_core::Matrix;
use proptest::prelude::*;

fn coeffs(max_degree: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_degree + 1)
}

fn abs_sum(c: &[f64]) -> f64 {
    c.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE)
}

fn layer(rows: usize, cols: usize, w: &[f64]) -> Layer {
    Layer::new(
        Matrix::from_row_major(rows, cols, w[..rows * cols].to_vec()).unwrap(),
        w[rows * cols..][..rows].to_vec(),
    )
    .unwrap()
}

/// A network with the given widths, weights drawn from `w` cyclically.
fn network(s: u32, widths: &[usize], w: &[f64]) -> RepuNetwork {
    let mut layers = Vec::new();
    let mut k = 0;
    for pair in widths.windows(2) {
        let n = pair[0] * pair[1] + pair[1];
        let chunk: Vec<f64> = (0..n).map(|i| w[(k + i) % w.len()]).collect();
        k += n;
        layers.push(layer(pair[1], pair[0], &chunk));
    }
    RepuNetwork::new(s, widths[0], layers).unwrap()
}

fn net_strategy() -> impl Strategy<Value = RepuNetwork> {
    (prop::collection::vec(1usize..=4, 2..=4), prop::collection::vec(-1.0f64..1.0, 8..64)).prop_map(
        |(mut widths, w)| {
            *widths.last_mut().unwrap() = 1;
            network(2, &widths, &w)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clenshaw_matches_direct_sum(c in coeffs(40), x in -1.0f64..=1.0) {
        let direct: f64 = c.iter().enumerate().map(|(j, cj)| cj * chebyshev_t(j, x)).sum();
        let e = ChebExpansion::new(c.clone()).unwrap();
        prop_assert!((e.eval(x) - direct).abs() <= 1e-13 * abs_sum(&c));
    }

    #[test]
    fn chebnet_reproduces_its_expansion(c in coeffs(40), x in -1.0f64..=1.0) {
        let e = ChebExpansion::new(c.clone()).unwrap();
        let net = build_chebnet_1d(&e).unwrap().network;
        prop_assert!((net.eval1(x).unwrap() - e.eval(x)).abs() <= 1e-11 * abs_sum(&c));
    }

    #[test]
    fn chebnet_depth_is_floor_log2_plus_one(n in 1usize..=128) {
        let e = ChebExpansion::basis(n);
        let r = build_chebnet_1d(&e).unwrap();
        let bound = n.ilog2() as usize + 1;
        if n >= 4 {
            prop_assert_eq!(r.network.hidden_layers(), bound);
        } else {
            prop_assert!(r.network.hidden_layers() <= bound);
        }
        prop_assert!(r.within_bounds());
    }

    #[test]
    fn general_section_chebnet_is_exact(s in 3usize..=5, c in coeffs(30), x in -1.0f64..=1.0) {
        let e = ChebExpansion::new(c.clone()).unwrap();
        let net = build_chebnet_1d_general(&e, s).unwrap().network;
        prop_assert!((net.eval1(x).unwrap() - e.eval(x)).abs() <= 1e-9 * abs_sum(&c));
    }

    #[test]
    fn hierarchical_form_agrees(s in 2usize..=5, c in coeffs(24), x in -1.0f64..=1.0) {
        let e = ChebExpansion::new(c.clone()).unwrap();
        let h = chebyshev_to_hierarchical(&e, s).unwrap();
        prop_assert!((h.eval(x) - e.eval(x)).abs() <= 1e-11 * abs_sum(&c));
    }

    #[test]
    fn basis_changes_preserve_values(c in coeffs(12), x in -1.0f64..=1.0) {
        let e = ChebExpansion::new(c.clone()).unwrap();
        let m = e.to_monomial_coeffs();
        let horner = m.iter().rev().fold(0.0, |acc, a| acc * x + a);
        prop_assert!((horner - e.eval(x)).abs() <= 1e-10 * abs_sum(&c));
        let l = LegendreExpansion::new(c.clone()).unwrap();
        prop_assert!((l.to_monomial().eval(x) - l.eval(x)).abs() <= 1e-10 * abs_sum(&c));
    }

    #[test]
    fn chebyshev_composition(m in 0usize..=16, n in 0usize..=16, x in -1.0f64..=1.0) {
        prop_assert!((chebyshev_t(m * n, x) - chebyshev_t(m, chebyshev_t(n, x))).abs() <= 1e-12);
    }

    #[test]
    fn condition_number_invariances(v in prop::collection::vec(-1.0f64..1.0, 9), scale in 0.01f64..100.0) {
        let mut data = v.clone();
        for i in 0..3 {
            data[i * 4] += 4.0; // keep it comfortably invertible
        }
        let a = Matrix::from_row_major(3, 3, data.clone()).unwrap();
        let k = condition_number(&a).unwrap();
        prop_assert!(k >= 1.0);
        prop_assert!((condition_number(&a.transpose()).unwrap() - k).abs() <= 1e-10 * k);
        let scaled = Matrix::from_row_major(3, 3, data.iter().map(|x| x * scale).collect()).unwrap();
        prop_assert!((condition_number(&scaled).unwrap() - k).abs() <= 1e-10 * k);
    }

    #[test]
    fn backward_matches_finite_differences(net in net_strategy(), x in prop::collection::vec(-1.0f64..1.0, 4)) {
        let x = &x[..net.input_dim()];
        let g = net.backward(x, &[1.0]).unwrap().flatten();
        let p = net.params();
        let h = 1e-5;
        for i in 0..p.len() {
            let mut probe = net.clone();
            let mut q = p.clone();
            q[i] = p[i] + h;
            probe.set_params(&q).unwrap();
            let up = probe.forward(x).unwrap()[0];
            q[i] = p[i] - h;
            probe.set_params(&q).unwrap();
            let down = probe.forward(x).unwrap()[0];
            let fd = (up - down) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0), "param {}: {} vs {}", i, fd, g[i]);
        }
    }

    #[test]
    fn params_round_trip(net in net_strategy()) {
        let mut copy = net.clone();
        copy.set_params(&net.params()).unwrap();
        prop_assert_eq!(copy, net);
    }

    #[test]
    fn training_is_deterministic_and_pure(net in net_strategy(), iterations in 0usize..8) {
        prop_assume!(net.input_dim() == 1);
        let data = Dataset::uniform_1d(|x| x * x, 20).unwrap();
        let cfg = TrainConfig { iterations, eta: 1e-3, ..TrainConfig::default() };
        let original = net.clone();
        let (a, na) = train(&net, &data, &cfg).unwrap();
        let (b, nb) = train(&net, &data, &cfg).unwrap();
        prop_assert_eq!(&net, &original);
        prop_assert_eq!(&na, &nb);
        prop_assert_eq!(a.losses.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                        b.losses.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        prop_assert!(a.losses.len() <= iterations);
        prop_assert!(a.losses.iter().all(|l| *l >= 0.0));
        if iterations == 0 {
            prop_assert_eq!(&na, &net);
            prop_assert_eq!(a.final_loss, loss_mse(&net, &data).unwrap());
        }
    }
}

#[test]
fn rmsprop_descends_on_a_quadratic() {
    // y = w x fitted to y = 2x from w = 0
    let net = RepuNetwork::affine(2, Matrix::from_row_major(1, 1, vec![0.0]).unwrap(), vec![0.0]).unwrap();
    let data = Dataset::uniform_1d(|x| 2.0 * x, 11).unwrap();
    let cfg = TrainConfig { iterations: 50, eta: 1e-3, ..TrainConfig::default() };
    let (trace, _) = train(&net, &data, &cfg).unwrap();
    assert!(trace.losses.windows(2).all(|w| w[1] < w[0]));
    assert!(trace.final_loss < trace.initial_loss);
}
