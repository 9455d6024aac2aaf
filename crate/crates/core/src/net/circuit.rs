//! Layered circuit builder for exact RePU constructions.
//!
//! A [`Signal`] is an affine combination of the unit outputs of one layer
//! (depth 0 is the input). New units are appended to any layer on demand, and
//! because a unit's pre-activation is itself an affine form over the previous
//! layer, consecutive affine maps never cost an extra layer.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::net::network::{Layer, RepuNetwork};
use crate::net::poly::{mixed_weights, power_sum};
use crate::num::powi;

/// `constant + Σ w_i u_i` over the units `u_i` of a single layer.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Affine {
    pub constant: f64,
    /// Sorted by unit index, without duplicates. Zero weights are kept so that
    /// the circuit shape never depends on coefficient values.
    pub terms: Vec<(usize, f64)>,
}

impl Affine {
    fn constant(c: f64) -> Self {
        Affine { constant: c, terms: Vec::new() }
    }

    fn unit(i: usize) -> Self {
        Affine { constant: 0.0, terms: vec![(i, 1.0)] }
    }

    fn scaled(&self, a: f64) -> Affine {
        Affine { constant: a * self.constant, terms: self.terms.iter().map(|&(i, w)| (i, a * w)).collect() }
    }

    fn add_scaled(&mut self, other: &Affine, a: f64) {
        self.constant += a * other.constant;
        let mut merged = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut p, mut q) = (0, 0);
        while p < self.terms.len() || q < other.terms.len() {
            match (self.terms.get(p), other.terms.get(q)) {
                (Some(&(i, w)), Some(&(j, v))) if i == j => {
                    merged.push((i, w + a * v));
                    p += 1;
                    q += 1;
                }
                (Some(&(i, w)), Some(&(j, _))) if i < j => {
                    merged.push((i, w));
                    p += 1;
                }
                (Some(&(i, w)), None) => {
                    merged.push((i, w));
                    p += 1;
                }
                (_, Some(&(j, v))) => {
                    merged.push((j, a * v));
                    q += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        self.terms = merged;
    }

    fn eval(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, w)| w * values[i]).sum::<f64>()
    }
}

/// A value available at a given depth of the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    depth: usize,
    form: Affine,
    /// Upper bounds on `|value|` and `|value - form.constant|` for inputs in
    /// `[-1, 1]^d`. Gadgets use them to feed unit-scale arguments to their
    /// units; they never change the shape.
    magnitude: f64,
    spread: f64,
}

impl Signal {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Constants are available at every depth for free.
    pub fn is_constant(&self) -> bool {
        self.form.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.is_constant().then_some(self.form.constant)
    }

    pub fn form(&self) -> &Affine {
        &self.form
    }

    /// Upper bound on `|value|` for inputs in `[-1, 1]^d`.
    pub fn bound(&self) -> f64 {
        self.magnitude
    }

    /// Scale used to normalize the signal; never zero.
    fn scale_hint(&self) -> f64 {
        if self.magnitude > 0.0 && self.magnitude.is_finite() {
            self.magnitude
        } else {
            1.0
        }
    }
}

type LiftKey = (usize, u64, Vec<(usize, u64)>);

#[derive(Debug, Clone)]
pub struct Circuit {
    s: u32,
    input_dim: usize,
    /// `layers[d - 1]` holds the pre-activations of the units at depth `d`.
    layers: Vec<Vec<Affine>>,
    lift_cache: BTreeMap<LiftKey, Signal>,
}

impl Circuit {
    pub fn new(s: u32, input_dim: usize) -> Self {
        assert!(s >= 2, "constructions use s >= 2");
        Circuit { s, input_dim, layers: Vec::new(), lift_cache: BTreeMap::new() }
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn input(&self, i: usize) -> Signal {
        assert!(i < self.input_dim, "input index out of range");
        Signal { depth: 0, form: Affine::unit(i), magnitude: 1.0, spread: 1.0 }
    }

    pub fn constant(&self, c: f64) -> Signal {
        Signal { depth: 0, form: Affine::constant(c), magnitude: libm::fabs(c), spread: 0.0 }
    }

    /// Number of units currently allocated at every depth.
    pub fn unit_counts(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    fn add_unit(&mut self, depth: usize, pre: Affine) -> usize {
        while self.layers.len() < depth {
            self.layers.push(Vec::new());
        }
        let layer = &mut self.layers[depth - 1];
        layer.push(pre);
        layer.len() - 1
    }

    /// `σ_s(pre)` as a new unit one layer below `pre`.
    fn activate(&mut self, pre: &Signal) -> Affine {
        Affine::unit(self.add_unit(pre.depth + 1, pre.form.clone()))
    }

    /// `Σ a_k x_k + constant`, lifting every non-constant part to the deepest one.
    pub fn combine(&mut self, parts: &[(f64, &Signal)], constant: f64) -> Signal {
        let depth = parts.iter().filter(|(_, p)| !p.is_constant()).map(|(_, p)| p.depth).max();
        let depth = depth.unwrap_or(0);
        let mut form = Affine::constant(constant);
        let (mut magnitude, mut spread) = (libm::fabs(constant), 0.0);
        for &(a, p) in parts {
            let lifted = self.lift(p, depth);
            form.add_scaled(&lifted.form, a);
            magnitude += libm::fabs(a) * p.magnitude;
            spread += libm::fabs(a) * p.spread;
        }
        let magnitude = magnitude.min(spread + libm::fabs(form.constant));
        Signal { depth, form, magnitude, spread }
    }

    pub fn scale(&self, a: f64, x: &Signal) -> Signal {
        Signal {
            depth: x.depth,
            form: x.form.scaled(a),
            magnitude: libm::fabs(a) * x.magnitude,
            spread: libm::fabs(a) * x.spread,
        }
    }

    /// Tightens the bound of `x` given `|x| ≤ bound`.
    pub fn with_bound(&self, x: &Signal, bound: f64) -> Signal {
        let magnitude = x.magnitude.min(bound);
        let spread = x.spread.min(bound + libm::fabs(x.form.constant));
        Signal { magnitude, spread, ..x.clone() }
    }

    /// Carries `x` down to `depth` with identity gadgets. Lifts are cached up
    /// to scaling and constant offset, so a signal is carried at most once per
    /// layer.
    pub fn lift(&mut self, x: &Signal, depth: usize) -> Signal {
        if x.is_constant() {
            return Signal { depth, ..x.clone() };
        }
        assert!(x.depth <= depth, "cannot lift a signal upwards");
        let mut cur = x.clone();
        while cur.depth < depth {
            cur = self.lift_once(&cur);
        }
        cur
    }

    fn lift_once(&mut self, x: &Signal) -> Signal {
        // normalize by the largest weight so the gadget sees unit-scale inputs;
        // an all-zero form is carried as the plain sum of its units and scaled
        // by zero afterwards
        let a = x.form.terms.iter().map(|t| t.1).filter(|w| *w != 0.0).fold(None, |best: Option<f64>, w| match best {
            Some(b) if libm::fabs(b) >= libm::fabs(w) => Some(b),
            _ => Some(w),
        });
        let terms: Vec<(usize, f64)> = match a {
            Some(a) => x.form.terms.iter().map(|&(i, w)| (i, w / a)).collect(),
            None => x.form.terms.iter().map(|&(i, _)| (i, 1.0)).collect(),
        };
        // the s = 2 identity is linear in its argument, so constants are added
        // afterwards and lifts are shared across offsets; the power-sum identity
        // for s > 2 loses precision on an argument with a large offset, so
        // there the constant stays inside
        let inner = match a {
            Some(a) if self.s != 2 => x.form.constant / a,
            _ => 0.0,
        };
        let key: LiftKey = (x.depth, inner.to_bits(), terms.iter().map(|&(i, w)| (i, w.to_bits())).collect());
        let lifted = match self.lift_cache.get(&key) {
            Some(s) => s.clone(),
            None => {
                let (magnitude, spread) = match a {
                    Some(a) if self.s != 2 => (x.magnitude / libm::fabs(a), x.spread / libm::fabs(a)),
                    Some(a) => (x.spread / libm::fabs(a), x.spread / libm::fabs(a)),
                    None => (0.0, 0.0),
                };
                let z = Signal { depth: x.depth, form: Affine { constant: inner, terms }, magnitude, spread };
                let s = self.identity_gadget(&z);
                self.lift_cache.insert(key, s.clone());
                s
            }
        };
        let mut form = lifted.form.scaled(a.unwrap_or(0.0));
        if inner == 0.0 {
            form.constant += x.form.constant;
        }
        Signal { depth: lifted.depth, form, magnitude: x.magnitude, spread: x.spread }
    }

    /// `z` one layer down: four units for `s = 2`, `2s` otherwise.
    fn identity_gadget(&mut self, z: &Signal) -> Signal {
        if self.s == 2 {
            let c = crate::net::gadgets::Lemma2Constants::new();
            let r = z.scale_hint();
            let mut form = Affine::default();
            for i in 0..4 {
                let pre = shifted(&z.form, c.omega1[i] / r, c.gamma1[i]);
                let u = self.activate(&Signal { depth: z.depth, form: pre, magnitude: 0.0, spread: 0.0 });
                form.add_scaled(&u, c.beta1[i] * r);
            }
            Signal { depth: z.depth + 1, form, magnitude: z.magnitude, spread: z.magnitude }
        } else {
            self.poly1(z, &[0.0, 1.0])
        }
    }

    /// `z²` with two units (`s = 2`).
    pub fn square(&mut self, z: &Signal) -> Signal {
        assert_eq!(self.s, 2, "square gadget needs s = 2");
        if let Some(c) = z.constant_value() {
            return self.constant(c * c);
        }
        let plus = self.activate(z);
        let minus = self.activate(&self.scale(-1.0, z));
        let mut form = plus;
        form.add_scaled(&minus, 1.0);
        let sq = z.magnitude * z.magnitude;
        Signal { depth: z.depth + 1, form, magnitude: sq, spread: sq }
    }

    /// `xy` with four units (`s = 2`); free if either factor is constant.
    pub fn product(&mut self, x: &Signal, y: &Signal) -> Signal {
        assert_eq!(self.s, 2, "product gadget needs s = 2");
        if let Some(c) = x.constant_value() {
            return self.scale(c, y);
        }
        if let Some(c) = y.constant_value() {
            return self.scale(c, x);
        }
        let depth = x.depth.max(y.depth);
        let (x, y) = (self.lift(x, depth), self.lift(y, depth));
        // both factors enter at unit scale
        let (rx, ry) = (x.scale_hint(), y.scale_hint());
        let c = crate::net::gadgets::Lemma2Constants::new();
        let mut form = Affine::default();
        for i in 0..4 {
            let mut pre = x.form.scaled(c.omega1[i] / rx);
            pre.add_scaled(&y.form, c.gamma1[i] / ry);
            let u = self.activate(&Signal { depth, form: pre, magnitude: 0.0, spread: 0.0 });
            form.add_scaled(&u, c.beta1[i] * rx * ry);
        }
        let xy = x.magnitude * y.magnitude;
        Signal { depth: depth + 1, form, magnitude: xy, spread: xy }
    }

    /// `Σ_{j ≤ s} p_j z^j` in one hidden layer with `2s` units.
    pub fn poly1(&mut self, z: &Signal, p: &[f64]) -> Signal {
        assert!(p.len() <= self.s as usize + 1, "degree exceeds s");
        if let Some(c) = z.constant_value() {
            let v = p.iter().rev().fold(0.0, |acc, pj| acc * c + pj);
            return self.constant(v);
        }
        // evaluate q(z / r) with q_j = p_j r^j so that the units see |z / r| ≤ 1
        let r = z.scale_hint();
        let q: Vec<f64> = p.iter().enumerate().map(|(j, pj)| pj * powi(r, j as u32)).collect();
        let ps = power_sum(self.s, &q);
        let sign = if self.s % 2 == 0 { 1.0 } else { -1.0 };
        let mut form = Affine::constant(ps.bias);
        for (&c, &lambda) in ps.shifts.iter().zip(&ps.lambdas) {
            let up = self.activate(&Signal {
                depth: z.depth,
                form: shifted(&z.form, 1.0 / r, c),
                magnitude: 0.0,
                spread: 0.0,
            });
            let down = self.activate(&Signal {
                depth: z.depth,
                form: shifted(&z.form, -1.0 / r, -c),
                magnitude: 0.0,
                spread: 0.0,
            });
            form.add_scaled(&up, lambda);
            form.add_scaled(&down, sign * lambda);
        }
        let magnitude: f64 = p.iter().enumerate().map(|(j, pj)| libm::fabs(*pj) * powi(z.magnitude, j as u32)).sum();
        let spread = magnitude + libm::fabs(ps.bias);
        Signal { depth: z.depth + 1, form, magnitude, spread }
    }

    /// `Σ_t v^t y_t` (`t < s`) in one hidden layer below the deepest input.
    pub fn mixed(&mut self, v: &Signal, ys: &[Signal]) -> Signal {
        let s = self.s as usize;
        assert!(ys.len() <= s, "at most s coefficient signals");
        let depth = ys.iter().chain(core::iter::once(v)).filter(|x| !x.is_constant()).map(Signal::depth).max();
        let depth = depth.unwrap_or(0);
        let v = self.lift(v, depth);
        let rv = v.scale_hint();
        let mut constant_part = vec![0.0; ys.len().max(1)];
        let mut parts: Vec<Signal> = Vec::new();
        for (t, y) in ys.iter().enumerate() {
            if let Some(c) = y.constant_value() {
                constant_part[t] = c;
                continue;
            }
            let y = self.lift(y, depth);
            if t == 0 {
                parts.push(self.lift(&y, depth + 1));
                continue;
            }
            // v^t y = rv^t ry (v / rv)^t (y / ry) keeps the cancelling powers
            // inside the identity at unit scale
            let ry = y.scale_hint();
            let (b, mu) = mixed_weights(t as u32);
            for (bi, mi) in b.iter().zip(&mu) {
                let mut z = v.form.scaled(1.0 / rv);
                z.add_scaled(&y.form, *bi / ry);
                let m = 1.0 + libm::fabs(*bi);
                let z = Signal { depth, form: z, magnitude: m, spread: m };
                let mut p = vec![0.0; t + 2];
                p[t + 1] = mi * powi(rv, t as u32) * ry / (t + 1) as f64;
                parts.push(self.poly1(&z, &p));
            }
        }
        if constant_part.iter().any(|c| *c != 0.0) || parts.is_empty() {
            parts.push(self.poly1(&v, &constant_part));
        }
        let refs: Vec<(f64, &Signal)> = parts.iter().map(|p| (1.0, p)).collect();
        let out = self.combine(&refs, 0.0);
        let bound = ys.iter().enumerate().map(|(t, y)| powi(v.magnitude, t as u32) * y.magnitude).sum();
        self.with_bound(&out, bound)
    }

    /// Converts the circuit into a network whose outputs are `outputs`.
    /// Units not reachable from an output are dropped.
    pub fn finish(&mut self, outputs: &[Signal]) -> RepuNetwork {
        let depth = outputs.iter().filter(|o| !o.is_constant()).map(Signal::depth).max().unwrap_or(0);
        let outputs: Vec<Signal> = outputs.iter().map(|o| self.lift(o, depth)).collect();

        // live[d][i]: unit i at depth d (d ≥ 1) is needed
        let mut live: Vec<Vec<bool>> =
            (0..=depth).map(|d| vec![false; if d == 0 { self.input_dim } else { self.layers[d - 1].len() }]).collect();
        for o in &outputs {
            for &(i, _) in &o.form.terms {
                live[depth][i] = true;
            }
        }
        for d in (1..=depth).rev() {
            for i in 0..self.layers[d - 1].len() {
                if live[d][i] {
                    for &(j, _) in &self.layers[d - 1][i].terms {
                        live[d - 1][j] = true;
                    }
                }
            }
        }
        let index: Vec<Vec<Option<usize>>> = live
            .iter()
            .enumerate()
            .map(|(d, flags)| {
                let mut next = 0;
                flags
                    .iter()
                    .map(|&keep| {
                        (d == 0 || keep).then(|| {
                            next += 1;
                            next - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let width = |d: usize| index[d].iter().filter(|x| x.is_some()).count();

        let mut layers = Vec::with_capacity(depth + 1);
        for d in 1..=depth {
            let mut w = Matrix::zeros(width(d), width(d - 1));
            let mut b = vec![0.0; width(d)];
            for (i, pre) in self.layers[d - 1].iter().enumerate() {
                let Some(row) = index[d][i] else { continue };
                b[row] = pre.constant;
                for &(j, v) in &pre.terms {
                    w[(row, index[d - 1][j].expect("live input"))] += v;
                }
            }
            layers.push(Layer { weights: w, bias: b });
        }
        let mut w = Matrix::zeros(outputs.len(), width(depth));
        let mut b = vec![0.0; outputs.len()];
        for (row, o) in outputs.iter().enumerate() {
            b[row] = o.form.constant;
            for &(j, v) in &o.form.terms {
                w[(row, index[depth][j].expect("live output"))] += v;
            }
        }
        layers.push(Layer { weights: w, bias: b });
        RepuNetwork::new(self.s, self.input_dim, layers).expect("circuit layers chain")
    }

    /// Direct evaluation of `signals` without building a network; used to
    /// cross-check [`finish`](Self::finish).
    pub fn evaluate(&self, x: &[f64], signals: &[Signal]) -> Vec<f64> {
        let mut values: Vec<Vec<f64>> = vec![x.to_vec()];
        for layer in &self.layers {
            let prev = values.last().expect("input layer");
            let next = layer.iter().map(|pre| crate::net::network::repu(self.s, pre.eval(prev))).collect();
            values.push(next);
        }
        signals
            .iter()
            .map(|sig| if sig.is_constant() { sig.form.constant } else { sig.form.eval(&values[sig.depth]) })
            .collect()
    }
}

/// `a·form + c`.
fn shifted(form: &Affine, a: f64, c: f64) -> Affine {
    let mut out = form.scaled(a);
    out.constant += c;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn product_and_square() {
        let mut c = Circuit::new(2, 2);
        let (x, y) = (c.input(0), c.input(1));
        let xy = c.product(&x, &y);
        let x2 = c.square(&x);
        let net = c.finish(&[xy, x2]);
        let out = net.forward(&[3.0, -2.0]).unwrap();
        assert!(close(out[0], -6.0, 1e-14) && close(out[1], 9.0, 1e-14));
        assert_eq!(net.hidden_layers(), 1);
    }

    #[test]
    fn lifts_of_the_same_signal_share_units() {
        let mut c = Circuit::new(2, 1);
        let x = c.input(0);
        let a = c.lift(&x, 3);
        let b = c.lift(&c.scale(-2.5, &x), 3);
        assert_eq!(c.unit_counts(), vec![4, 4, 4]);
        let net = c.finish(&[a, b]);
        let out = net.forward(&[0.7]).unwrap();
        assert!(close(out[0], 0.7, 1e-14) && close(out[1], -1.75, 1e-14));
    }

    #[test]
    fn poly1_and_mixed_for_general_s() {
        for s in 2..=6u32 {
            let mut c = Circuit::new(s, 2);
            let (v, y) = (c.input(0), c.input(1));
            let p: Vec<f64> = (0..=s).map(|j| 1.0 - 0.4 * j as f64).collect();
            let poly = c.poly1(&v, &p);
            let y1 = c.scale(0.5, &y);
            let ys: Vec<Signal> = (0..s as usize).map(|t| if t == 1 { c.constant(2.0) } else { y1.clone() }).collect();
            let mix = c.mixed(&v, &ys);
            let net = c.finish(&[poly, mix]);
            let (vx, yx) = (0.37, -0.81);
            let out = net.forward(&[vx, yx]).unwrap();
            let want_poly: f64 = p.iter().rev().fold(0.0, |acc, pj| acc * vx + pj);
            let want_mix: f64 =
                (0..s as i32).map(|t| crate::num::powi(vx, t as u32) * if t == 1 { 2.0 } else { 0.5 * yx }).sum();
            assert!(close(out[0], want_poly, 1e-12), "s={s}");
            assert!(close(out[1], want_mix, 1e-12), "s={s}: {} vs {want_mix}", out[1]);
            assert_eq!(net.hidden_layers(), 1);
        }
    }

    #[test]
    fn finish_matches_direct_evaluation() {
        let mut c = Circuit::new(3, 1);
        let x = c.input(0);
        let x3 = c.poly1(&x, &[0.0, 0.0, 0.0, 1.0]);
        let x9 = c.poly1(&x3, &[0.0, 0.0, 0.0, 1.0]);
        let sum = c.combine(&[(1.0, &x), (2.0, &x9)], 0.5);
        let direct = c.evaluate(&[0.9], core::slice::from_ref(&sum))[0];
        let net = c.finish(&[sum]);
        assert!(close(net.eval1(0.9).unwrap(), direct, 1e-13));
        assert_eq!(net.hidden_layers(), 2);
    }
}
