//! Exact ChebNet and PowerNet constructions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cheb::chebyshev::{chebyshev_monomial_coeffs, ChebExpansion};
use crate::cheb::hierarchical::{chebyshev_to_hierarchical, split_by_section};
use crate::cheb::legendre::MonomialExpansion;
use crate::cheb::multivariate::MultiChebExpansion;
use crate::error::{invalid, Error, Result};
use crate::index_set::IndexSetKind;
use crate::net::gadgets::{chain_step, ChainKind};
use crate::net::{Circuit, ComplexityReport, RepuNetwork, Signal};
use crate::num::{ipow, level_for_degree, Fnv};

/// Activation units per coefficient allowed by the size bounds of the
/// `s = 2` constructions.
pub const S2_UNITS_PER_COEFF: usize = 16;
/// Nonzero weights per coefficient allowed by the size bounds of the `s = 2`
/// constructions.
pub const S2_WEIGHTS_PER_COEFF: usize = 48;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionReceipt {
    pub network: RepuNetwork,
    /// Hidden-layer count promised by the construction.
    pub predicted_depth: usize,
    pub activation_bound: usize,
    pub nonzero_bound: usize,
    /// FNV-1a hash of the source coefficients.
    pub fingerprint: u64,
}

impl ConstructionReceipt {
    pub fn complexity(&self) -> ComplexityReport {
        self.network.complexity()
    }

    pub fn within_bounds(&self) -> bool {
        let c = self.complexity();
        c.hidden_layers <= self.predicted_depth
            && c.activation_count <= self.activation_bound
            && c.nonzero_weights <= self.nonzero_bound
    }
}

/// `⌊log₂ n⌋` with `0 ↦ 0`.
fn floor_log2(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize
    }
}

/// `⌈log_s n⌉` for `n ≥ 1`.
fn ceil_log(n: usize, s: usize) -> usize {
    let mut k = 0;
    let mut p = 1usize;
    while p < n {
        p = p.saturating_mul(s);
        k += 1;
    }
    k
}

fn fingerprint_1d(tag: &[u8], s: usize, coeffs: &[f64]) -> u64 {
    let mut h = Fnv::new();
    h.bytes(tag);
    h.word(s as u64);
    for c in coeffs {
        h.word(c.to_bits());
    }
    h.finish()
}

/// Shared state of the `s = 2` assembly: the circuit and the squaring chains
/// already built for each input coordinate and starting depth.
struct S2Builder {
    circuit: Circuit,
    kind: ChainKind,
    chains: BTreeMap<(usize, usize), Vec<Signal>>,
}

impl S2Builder {
    fn new(input_dim: usize, kind: ChainKind) -> Self {
        S2Builder { circuit: Circuit::new(2, input_dim), kind, chains: BTreeMap::new() }
    }

    /// `T_{2^k}(x_axis)` (or `x_axis^{2^k}`) at depth `start + k`.
    fn chain(&mut self, axis: usize, start: usize, k: usize) -> Signal {
        if !self.chains.contains_key(&(axis, start)) {
            let x = self.circuit.input(axis);
            let base = self.circuit.lift(&x, start);
            self.chains.insert((axis, start), vec![base]);
        }
        let kind = self.kind;
        let chain = self.chains.get_mut(&(axis, start)).expect("inserted above");
        while chain.len() <= k {
            let next = chain_step(&mut self.circuit, chain.last().expect("non-empty"), kind);
            chain.push(next);
        }
        chain[k].clone()
    }

    /// `Σ_j B_j Ĥ_j(x_axis)` for coefficient signals `B_j` (hierarchical
    /// coefficients). The result depth is `D + ⌊log₂ n⌋ + 1` where `D` is the
    /// deepest coefficient, except that `n = 0` returns `B_0` unchanged.
    fn assemble(&mut self, axis: usize, coeffs: &[Signal]) -> Signal {
        let n = coeffs.len() - 1;
        if n == 0 {
            return coeffs[0].clone();
        }
        let depth = coeffs.iter().filter(|c| !c.is_constant()).map(Signal::depth).max().unwrap_or(0);
        self.block(axis, coeffs, depth, floor_log2(n), 0)
    }

    /// The part of the expansion with indices `start .. start + 2^{k+1}`,
    /// divided by the higher basis factors: `r + T_{2^k} q`.
    fn block(&mut self, axis: usize, coeffs: &[Signal], depth: usize, k: usize, start: usize) -> Signal {
        let n = coeffs.len() - 1;
        if k == 0 {
            // indices beyond n enter as a zero multiple of x so that the shape
            // of the circuit depends on n only
            let x = self.chain(axis, depth, 0);
            let zero = self.circuit.constant(0.0);
            let hi = coeffs.get(start + 1).unwrap_or(&zero).clone();
            let lo = coeffs[start].clone();
            let prod = self.circuit.product(&hi, &x);
            return self.circuit.combine(&[(1.0, &lo), (1.0, &prod)], 0.0);
        }
        let r = self.block(axis, coeffs, depth, k - 1, start);
        let half = ipow(2, k as u32);
        if start + half > n {
            return r;
        }
        let q = self.block(axis, coeffs, depth, k - 1, start + half);
        let t = self.chain(axis, depth, k);
        let prod = self.circuit.product(&q, &t);
        self.circuit.combine(&[(1.0, &r), (1.0, &prod)], 0.0)
    }
}

fn s2_bounds(network: RepuNetwork, predicted_depth: usize, terms: usize, fingerprint: u64) -> ConstructionReceipt {
    ConstructionReceipt {
        network,
        predicted_depth,
        activation_bound: S2_UNITS_PER_COEFF * terms,
        nonzero_bound: S2_WEIGHTS_PER_COEFF * terms,
        fingerprint,
    }
}

/// One-dimensional `s = 2` build shared by ChebNet and PowerNet. `coeffs`
/// are hierarchical Chebyshev coefficients or plain monomial coefficients.
fn build_1d_s2(coeffs: &[f64], kind: ChainKind, fingerprint: u64) -> ConstructionReceipt {
    let n = coeffs.len() - 1;
    let mut b = S2Builder::new(1, kind);
    let x = b.circuit.input(0);
    let out = match n {
        0 => b.circuit.constant(coeffs[0]),
        1 | 2 => {
            // one hidden layer: carried x plus (for n = 2) one squaring step
            let carried = b.circuit.lift(&x, 1);
            let mut parts = vec![(coeffs[1], carried)];
            if n == 2 {
                parts.push((coeffs[2], b.chain(0, 0, 1)));
            }
            let refs: Vec<(f64, &Signal)> = parts.iter().map(|(a, s)| (*a, s)).collect();
            b.circuit.combine(&refs, coeffs[0])
        }
        _ => {
            let signals: Vec<Signal> = coeffs.iter().map(|c| b.circuit.constant(*c)).collect();
            b.assemble(0, &signals)
        }
    };
    let network = b.circuit.finish(&[out]);
    let depth = if n == 0 { 0 } else { floor_log2(n) + 1 };
    s2_bounds(network, depth, n + 1, fingerprint)
}

/// ChebNet for `Σ c_j T_j(x)` with `σ_2` units and `⌊log₂ n⌋ + 1` hidden layers.
pub fn build_chebnet_1d(e: &ChebExpansion) -> Result<ConstructionReceipt> {
    check_finite(e.coeffs())?;
    let h = chebyshev_to_hierarchical(e, 2)?;
    Ok(build_1d_s2(h.coeffs(), ChainKind::Chebyshev, fingerprint_1d(b"cheb", 2, e.coeffs())))
}

/// PowerNet for `Σ a_j x^j`; same shape as the ChebNet of the same length.
pub fn build_powernet_1d(e: &MonomialExpansion) -> Result<ConstructionReceipt> {
    check_finite(e.coeffs())?;
    Ok(build_1d_s2(e.coeffs(), ChainKind::Power, fingerprint_1d(b"power", 2, e.coeffs())))
}

fn check_finite(coeffs: &[f64]) -> Result<()> {
    match coeffs.iter().position(|c| !c.is_finite()) {
        Some(i) => Err(Error::NonFinite(format!("coefficient {i}"))),
        None => Ok(()),
    }
}

/// ChebNet with `σ_s` units and at most `⌈log_s n⌉ + 1` hidden layers.
pub fn build_chebnet_1d_general(e: &ChebExpansion, s: usize) -> Result<ConstructionReceipt> {
    if !(2..=32).contains(&s) {
        return Err(invalid(format!("section s = {s} outside 2..=32")));
    }
    check_finite(e.coeffs())?;
    let n = e.degree();
    let mut c = Circuit::new(s as u32, 1);
    let x = c.input(0);
    let mut chain = vec![x.clone()];
    let out = general_block(&mut c, e.coeffs(), &mut chain);
    // degree one still gets its single hidden layer
    let out = if n == 1 { c.lift(&out, 1) } else { out };
    let network = c.finish(&[out]);
    let predicted_depth = if n == 0 { 0 } else { ceil_log(n, s) + 1 };
    let per_coeff = 8 * s * s * s;
    Ok(ConstructionReceipt {
        network,
        predicted_depth,
        activation_bound: per_coeff * (n + 1),
        nonzero_bound: 4 * per_coeff * (n + 1),
        fingerprint: fingerprint_1d(b"cheb", s, e.coeffs()),
    })
}

/// `T_{s^k}(x)` at depth `k`, extending the shared chain as needed.
fn general_chain(c: &mut Circuit, chain: &mut Vec<Signal>, k: usize) -> Signal {
    let s = c.s() as usize;
    let ts = chebyshev_monomial_coeffs(s);
    while chain.len() <= k {
        let next = c.poly1(chain.last().expect("non-empty"), &ts);
        let next = c.with_bound(&next, 1.0);
        chain.push(next);
    }
    chain[k].clone()
}

/// Realizes `Σ_j b_j T_j(x)`; the result has depth `⌊log_s n⌋ + 1` for `n > s`,
/// one for `2 ≤ n ≤ s`, and zero for `n ≤ 1`.
fn general_block(c: &mut Circuit, b: &[f64], chain: &mut Vec<Signal>) -> Signal {
    let s = c.s() as usize;
    let n = b.len() - 1;
    let x = chain[0].clone();
    if n <= 1 {
        let slope = b.get(1).copied().unwrap_or(0.0);
        return if n == 0 { c.constant(b[0]) } else { c.combine(&[(slope, &x)], b[0]) };
    }
    let monomial = ChebExpansion::new(b.to_vec()).expect("non-empty").to_monomial_coeffs();
    if n <= s {
        let leaf = c.poly1(&x, &monomial);
        return c.with_bound(&leaf, abs_sum(b));
    }
    let k = level_for_degree(n, s) as usize;
    let width = ipow(s, k as u32);
    let mut padded = b.to_vec();
    padded.resize(width * s, 0.0);
    let blocks = split_by_section(&padded, s);
    let mut parts: Vec<(usize, Signal)> = Vec::new();
    for (l, block) in blocks.iter().enumerate() {
        let Some(deg) = structural_degree(n, width, s, l) else { continue };
        parts.push((l, general_block(c, &block[..=deg], chain)));
    }
    let v = general_chain(c, chain, k);
    // Σ_l P_l T_l(v) = Σ_t v^t y_t with y_t = Σ_l [T_l]_t P_l
    let ys: Vec<Signal> = (0..s)
        .map(|t| {
            let terms: Vec<(f64, &Signal)> = parts
                .iter()
                .filter_map(|(l, p)| {
                    let w = chebyshev_monomial_coeffs(*l).get(t).copied().unwrap_or(0.0);
                    (w != 0.0).then_some((w, p))
                })
                .collect();
            c.combine(&terms, 0.0)
        })
        .collect();
    let out = c.mixed(&v, &ys);
    c.with_bound(&out, abs_sum(b))
}

/// `Σ|b_j|` bounds `|Σ b_j T_j|` on `[-1, 1]`.
fn abs_sum(b: &[f64]) -> f64 {
    b.iter().map(|x| libm::fabs(*x)).sum()
}

/// Highest coefficient of split block `l` that can be nonzero for a degree-`n`
/// source, or `None` when the whole block vanishes.
fn structural_degree(n: usize, width: usize, s: usize, l: usize) -> Option<usize> {
    if l * width > n {
        return None;
    }
    (0..width).rev().find(|&j| j == 0 || l * width + j <= n || (l + 1 < s && (l + 2) * width - j <= n))
}

/// Multivariate ChebNet over a total-degree index set.
pub fn build_chebnet_total_degree(e: &MultiChebExpansion) -> Result<ConstructionReceipt> {
    let IndexSetKind::TotalDegree { n } = e.index_set().kind() else {
        return Err(invalid("expansion is not over a total-degree index set"));
    };
    let d = e.dim();
    build_multivariate(e, d * floor_log2(n) + d)
}

/// Multivariate ChebNet over a tensor-product index set.
pub fn build_chebnet_tensor(e: &MultiChebExpansion) -> Result<ConstructionReceipt> {
    let IndexSetKind::Tensor { n } = e.index_set().kind() else {
        return Err(invalid("expansion is not over a tensor-product index set"));
    };
    let d = e.dim();
    build_multivariate(e, d * floor_log2(n) + d)
}

/// Multivariate ChebNet over any downward-closed index set.
pub fn build_chebnet_downward_closed(e: &MultiChebExpansion) -> Result<ConstructionReceipt> {
    let set = e.index_set();
    let bound = (0..set.dim()).map(|i| floor_log2(set.max_degree(i)) + 1).sum();
    build_multivariate(e, bound)
}

fn build_multivariate(e: &MultiChebExpansion, predicted_depth: usize) -> Result<ConstructionReceipt> {
    if !e.index_set().is_downward_closed() {
        return Err(Error::NotDownwardClosed);
    }
    let values: Vec<f64> = e.coeffs().values().copied().collect();
    check_finite(&values)?;
    let h = e.to_hierarchical()?;
    let entries: Vec<(&[usize], f64)> = h.coeffs().iter().map(|(k, c)| (k.as_slice(), *c)).collect();
    let mut b = S2Builder::new(e.dim(), ChainKind::Chebyshev);
    let out = assemble_multi(&mut b, &entries, 0);
    let network = b.circuit.finish(&[out]);

    let mut fp = Fnv::new();
    fp.bytes(b"multi");
    fp.word(e.dim() as u64);
    for (k, c) in e.coeffs() {
        for ki in k {
            fp.word(*ki as u64);
        }
        fp.word(c.to_bits());
    }
    let terms = e.index_set().len() * e.dim();
    Ok(s2_bounds(network, predicted_depth, terms, fp.finish()))
}

/// `entries` hold the coordinates `axis..d` of each index with its
/// hierarchical coefficient; the leading coordinate is assembled last.
fn assemble_multi(b: &mut S2Builder, entries: &[(&[usize], f64)], axis: usize) -> Signal {
    if entries[0].0.len() == axis {
        let total: f64 = entries.iter().map(|e| e.1).sum();
        return b.circuit.constant(total);
    }
    let mut groups: BTreeMap<usize, Vec<(&[usize], f64)>> = BTreeMap::new();
    for &(k, c) in entries {
        groups.entry(k[axis]).or_default().push((k, c));
    }
    let n = *groups.keys().next_back().expect("non-empty");
    let coeffs: Vec<Signal> = (0..=n)
        .map(|i| match groups.get(&i) {
            Some(g) => assemble_multi(b, g, axis + 1),
            None => b.circuit.constant(0.0),
        })
        .collect();
    b.assemble(axis, &coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_set::IndexSet;

    #[test]
    fn small_cases() {
        let r = build_chebnet_1d(&ChebExpansion::new(vec![3.0, 2.0]).unwrap()).unwrap();
        assert!((r.network.eval1(0.5).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(r.complexity().hidden_layers, 1);
        let r = build_chebnet_1d(&ChebExpansion::basis(3)).unwrap();
        assert!((r.network.eval1(0.5).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(r.complexity().hidden_layers, 2);
        let r = build_chebnet_1d(&ChebExpansion::new(vec![2.5]).unwrap()).unwrap();
        assert_eq!(r.complexity().hidden_layers, 0);
        assert_eq!(r.network.eval1(9.0).unwrap(), 2.5);
    }

    #[test]
    fn depth_is_exact_from_four_on() {
        for n in [4usize, 5, 7, 8, 15, 16, 17, 31, 32, 33] {
            let c: Vec<f64> = (0..=n).map(|j| 1.0 / (j + 1) as f64).collect();
            let r = build_chebnet_1d(&ChebExpansion::new(c).unwrap()).unwrap();
            assert_eq!(r.complexity().hidden_layers, floor_log2(n) + 1, "n={n}");
            assert!(r.within_bounds(), "n={n}: {:?}", r.complexity());
        }
    }

    #[test]
    fn powernet_squares() {
        let r = build_powernet_1d(&MonomialExpansion::new(vec![0.0, 0.0, 1.0]).unwrap()).unwrap();
        assert!((r.network.eval1(0.5).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn general_s_t3() {
        let r = build_chebnet_1d_general(&ChebExpansion::basis(3), 3).unwrap();
        assert!((r.network.eval1(0.5).unwrap() + 1.0).abs() < 1e-13);
        assert!(r.complexity().hidden_layers <= 2);
    }

    #[test]
    fn structural_degree_of_split_blocks() {
        // n = 10, s = 3, width 9: block 0 needs j with 18 - j ≤ 10, i.e. all j
        assert_eq!(structural_degree(10, 9, 3, 0), Some(8));
        assert_eq!(structural_degree(10, 9, 3, 1), Some(1));
        assert_eq!(structural_degree(10, 9, 3, 2), None);
    }

    #[test]
    fn linear_tensor_sum() {
        let set = IndexSet::tensor(1, 2).unwrap();
        let e = MultiChebExpansion::from_fn(set, |k| if k.iter().sum::<usize>() == 1 { 1.0 } else { 0.0 });
        let r = build_chebnet_tensor(&e).unwrap();
        assert!((r.network.forward(&[0.3, 0.4]).unwrap()[0] - 0.7).abs() < 1e-14);
    }

    #[test]
    fn not_downward_closed_rejected() {
        let set = IndexSet::custom(2, [vec![0, 0], vec![2, 0]]).unwrap();
        let e = MultiChebExpansion::from_fn(set, |_| 1.0);
        assert_eq!(build_chebnet_downward_closed(&e), Err(Error::NotDownwardClosed));
    }

    #[test]
    fn constant_multivariate() {
        let set = IndexSet::custom(2, [vec![0, 0]]).unwrap();
        let e = MultiChebExpansion::from_fn(set, |_| 1.5);
        let r = build_chebnet_downward_closed(&e).unwrap();
        assert_eq!(r.complexity().hidden_layers, 0);
        assert_eq!(r.network.forward(&[0.2, 0.9]).unwrap(), vec![1.5]);
    }
}
