use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;
use crate::num::powi;

/// `σ_s(x) = x^s` for `x ≥ 0`, else `0`. For `s = 0` this is the unit step.
pub fn repu(s: u32, x: f64) -> f64 {
    if x >= 0.0 {
        powi(x, s)
    } else {
        0.0
    }
}

/// `σ_s'(x) = s σ_{s-1}(x)`, with the value 0 at `x = 0` for `s ≥ 2`.
pub fn repu_derivative(s: u32, x: f64) -> Result<f64> {
    match s {
        0 => Err(Error::NonDifferentiable),
        1 => Ok(if x > 0.0 { 1.0 } else { 0.0 }),
        _ => Ok(if x > 0.0 { s as f64 * powi(x, s - 1) } else { 0.0 }),
    }
}

/// One affine map `x ↦ A x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn new(weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::DimensionMismatch { expected: weights.rows(), found: bias.len() });
        }
        Ok(Layer { weights, bias })
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.weights.mul_vec(x);
        for (zi, bi) in z.iter_mut().zip(&self.bias) {
            *zi += bi;
        }
        z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityReport {
    pub hidden_layers: usize,
    pub activation_count: usize,
    pub nonzero_weights: usize,
}

/// `Φ = ((A_1, b_1), …, (A_L, b_L))` with `σ_s` after every layer but the last.
///
/// Builders always emit `s ≥ 2`; smaller powers are accepted so that the
/// step and ReLU cases can still be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct RepuNetwork {
    s: u32,
    input_dim: usize,
    layers: Vec<Layer>,
}

/// Reverse-mode result: one `(dA, db)` per layer plus the input gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
    pub input: Vec<f64>,
}

impl Gradients {
    /// Flattened in the same order as [`RepuNetwork::params`].
    pub fn flatten(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }
}

impl RepuNetwork {
    pub fn new(s: u32, input_dim: usize, layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(invalid("a network needs at least one layer"));
        }
        let mut dim = input_dim;
        for (k, layer) in layers.iter().enumerate() {
            if layer.in_dim() != dim {
                return Err(invalid(format!("layer {} expects {} inputs but receives {dim}", k + 1, layer.in_dim())));
            }
            if layer.bias.len() != layer.out_dim() {
                return Err(Error::DimensionMismatch { expected: layer.out_dim(), found: layer.bias.len() });
            }
            dim = layer.out_dim();
        }
        Ok(RepuNetwork { s, input_dim, layers })
    }

    /// The single affine map `x ↦ A x + b` (no hidden layers).
    pub fn affine(s: u32, weights: Matrix, bias: Vec<f64>) -> Result<Self> {
        let input_dim = weights.cols();
        RepuNetwork::new(s, input_dim, vec![Layer::new(weights, bias)?])
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Layer::out_dim)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    pub fn hidden_layers(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: x.len() });
        }
        let last = self.layers.len() - 1;
        let mut h = x.to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            h = layer.apply(&h);
            if k < last {
                for v in h.iter_mut() {
                    *v = repu(self.s, *v);
                }
            }
        }
        Ok(h)
    }

    /// Scalar-output convenience for one-dimensional inputs.
    pub fn eval1(&self, x: f64) -> Result<f64> {
        Ok(self.forward(&[x])?[0])
    }

    /// Gradients of `upstream · Φ(x)` with respect to all parameters and `x`.
    pub fn backward(&self, x: &[f64], upstream: &[f64]) -> Result<Gradients> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: x.len() });
        }
        if upstream.len() != self.output_dim() {
            return Err(Error::DimensionMismatch { expected: self.output_dim(), found: upstream.len() });
        }
        if self.s == 0 && self.layers.len() > 1 {
            return Err(Error::NonDifferentiable);
        }
        let last = self.layers.len() - 1;
        // activations[k] is the input of layer k; pre[k] its pre-activation
        let mut activations = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut h = x.to_vec();
        for (k, layer) in self.layers.iter().enumerate() {
            let z = layer.apply(&h);
            activations.push(h);
            h = if k < last { z.iter().map(|v| repu(self.s, *v)).collect() } else { z.clone() };
            pre.push(z);
        }
        let mut grads: Vec<Layer> = Vec::with_capacity(self.layers.len());
        let mut delta = upstream.to_vec();
        for k in (0..self.layers.len()).rev() {
            if k < last {
                for (d, z) in delta.iter_mut().zip(&pre[k]) {
                    *d *= repu_derivative(self.s, *z)?;
                }
            }
            let layer = &self.layers[k];
            let input = &activations[k];
            let mut dw = Matrix::zeros(layer.out_dim(), layer.in_dim());
            for (i, &di) in delta.iter().enumerate() {
                if di == 0.0 {
                    continue;
                }
                for (j, &aj) in input.iter().enumerate() {
                    dw[(i, j)] = di * aj;
                }
            }
            grads.push(Layer { weights: dw, bias: delta.clone() });
            delta = layer.weights.tr_mul_vec(&delta);
        }
        grads.reverse();
        Ok(Gradients { layers: grads, input: delta })
    }

    pub fn complexity(&self) -> ComplexityReport {
        let last = self.layers.len() - 1;
        ComplexityReport {
            hidden_layers: last,
            activation_count: self.layers[..last].iter().map(Layer::out_dim).sum(),
            nonzero_weights: self
                .layers
                .iter()
                .map(|l| l.weights.count_nonzero() + l.bias.iter().filter(|b| **b != 0.0).count())
                .sum(),
        }
    }

    /// Number of trainable scalars.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.rows() * l.weights.cols() + l.bias.len()).sum()
    }

    /// All weights then biases, layer by layer.
    pub fn params(&self) -> Vec<f64> {
        flatten_layers(&self.layers)
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::DimensionMismatch { expected: self.param_count(), found: params.len() });
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            let w = layer.weights.as_mut_slice();
            w.copy_from_slice(&params[offset..offset + w.len()]);
            offset += w.len();
            let n = layer.bias.len();
            layer.bias.copy_from_slice(&params[offset..offset + n]);
            offset += n;
        }
        Ok(())
    }

    /// `phi2 ∘ phi1` with the seam fused: phi1's last affine map and phi2's
    /// first one are multiplied out, so no hidden layer is added.
    pub fn concat(phi1: &RepuNetwork, phi2: &RepuNetwork) -> Result<RepuNetwork> {
        if phi1.s != phi2.s {
            return Err(invalid(format!("activation powers differ: {} vs {}", phi1.s, phi2.s)));
        }
        if phi1.output_dim() != phi2.input_dim {
            return Err(Error::DimensionMismatch { expected: phi2.input_dim, found: phi1.output_dim() });
        }
        let (head, tail) = (&phi1.layers, &phi2.layers);
        let seam_a = head.last().expect("non-empty");
        let seam_b = &tail[0];
        let weights = seam_b.weights.matmul(&seam_a.weights);
        let mut bias = seam_b.weights.mul_vec(&seam_a.bias);
        for (b, c) in bias.iter_mut().zip(&seam_b.bias) {
            *b += c;
        }
        let mut layers = head[..head.len() - 1].to_vec();
        layers.push(Layer { weights, bias });
        layers.extend_from_slice(&tail[1..]);
        RepuNetwork::new(phi1.s, phi1.input_dim, layers)
    }

    /// Runs equal-depth networks side by side on a shared input; the output
    /// is the concatenation of the member outputs.
    pub fn parallelize(nets: &[RepuNetwork]) -> Result<RepuNetwork> {
        let first = nets.first().ok_or_else(|| invalid("nothing to parallelize"))?;
        for n in nets {
            if n.layers.len() != first.layers.len() {
                return Err(invalid(format!(
                    "depth mismatch: {} vs {} hidden layers; pad with identity carries first",
                    n.hidden_layers(),
                    first.hidden_layers()
                )));
            }
            if n.s != first.s || n.input_dim != first.input_dim {
                return Err(invalid("members must share s and input dimension"));
            }
        }
        let mut layers = Vec::with_capacity(first.layers.len());
        for k in 0..first.layers.len() {
            let rows: usize = nets.iter().map(|n| n.layers[k].out_dim()).sum();
            let cols = if k == 0 { first.input_dim } else { nets.iter().map(|n| n.layers[k].in_dim()).sum() };
            let mut w = Matrix::zeros(rows, cols);
            let mut bias = Vec::with_capacity(rows);
            let (mut r0, mut c0) = (0, 0);
            for n in nets {
                let l = &n.layers[k];
                for i in 0..l.out_dim() {
                    for j in 0..l.in_dim() {
                        w[(r0 + i, c0 + j)] = l.weights[(i, j)];
                    }
                }
                bias.extend_from_slice(&l.bias);
                r0 += l.out_dim();
                if k > 0 {
                    c0 += l.in_dim();
                }
            }
            layers.push(Layer { weights: w, bias });
        }
        RepuNetwork::new(first.s, first.input_dim, layers)
    }

    /// Drops hidden units that cannot affect the output: units whose outgoing
    /// weights are all zero, and (for `s ≥ 1`) units whose incoming weights and
    /// bias are all zero, since `σ_s(0) = 0`. Repeats until nothing changes.
    pub fn normalize(&self) -> RepuNetwork {
        let mut layers = self.layers.clone();
        loop {
            let mut changed = false;
            for k in 0..layers.len() - 1 {
                let keep: Vec<usize> = (0..layers[k].out_dim())
                    .filter(|&i| {
                        let next = &layers[k + 1].weights;
                        let used = (0..next.rows()).any(|r| next[(r, i)] != 0.0);
                        let live = self.s == 0
                            || layers[k].bias[i] != 0.0
                            || layers[k].weights.row(i).iter().any(|w| *w != 0.0);
                        used && live
                    })
                    .collect();
                if keep.len() == layers[k].out_dim() {
                    continue;
                }
                changed = true;
                let cur = &layers[k];
                let mut w = Matrix::zeros(keep.len(), cur.in_dim());
                for (ni, &i) in keep.iter().enumerate() {
                    for j in 0..cur.in_dim() {
                        w[(ni, j)] = cur.weights[(i, j)];
                    }
                }
                let bias = keep.iter().map(|&i| cur.bias[i]).collect();
                layers[k] = Layer { weights: w, bias };
                let next = &layers[k + 1];
                let mut nw = Matrix::zeros(next.out_dim(), keep.len());
                for r in 0..next.out_dim() {
                    for (nj, &j) in keep.iter().enumerate() {
                        nw[(r, nj)] = next.weights[(r, j)];
                    }
                }
                layers[k + 1].weights = nw;
            }
            if !changed {
                break;
            }
        }
        RepuNetwork { s: self.s, input_dim: self.input_dim, layers }
    }
}

fn flatten_layers(layers: &[Layer]) -> Vec<f64> {
    let mut out = Vec::new();
    for l in layers {
        out.extend_from_slice(l.weights.as_slice());
        out.extend_from_slice(&l.bias);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(w: f64) -> RepuNetwork {
        let l1 = Layer::new(Matrix::from_rows(&[vec![w]]).unwrap(), vec![0.0]).unwrap();
        let l2 = Layer::new(Matrix::identity(1), vec![0.0]).unwrap();
        RepuNetwork::new(2, 1, vec![l1, l2]).unwrap()
    }

    #[test]
    fn repu_values() {
        assert_eq!(repu(2, -1.0), 0.0);
        assert_eq!(repu(2, 3.0), 9.0);
        assert_eq!(repu(3, 0.0), 0.0);
        assert_eq!(repu_derivative(2, 0.0), Ok(0.0));
        assert_eq!(repu_derivative(0, 1.0), Err(Error::NonDifferentiable));
    }

    #[test]
    fn hand_gradient_of_single_unit() {
        let g = single(1.0).backward(&[2.0], &[1.0]).unwrap();
        assert_eq!(g.layers[0].weights[(0, 0)], 8.0);
        assert_eq!(g.input, vec![4.0]);
    }

    #[test]
    fn dead_branch_has_zero_gradient() {
        let g = single(-1.0).backward(&[2.0], &[1.0]).unwrap();
        assert_eq!(g.layers[0].weights[(0, 0)], 0.0);
        assert_eq!(g.layers[0].bias[0], 0.0);
    }

    #[test]
    fn step_activation_is_not_differentiable() {
        let mut n = single(1.0);
        n.s = 0;
        assert_eq!(n.backward(&[1.0], &[1.0]), Err(Error::NonDifferentiable));
    }

    #[test]
    fn mismatched_chain_rejected() {
        let l1 = Layer::new(Matrix::zeros(2, 1), vec![0.0; 2]).unwrap();
        let l2 = Layer::new(Matrix::zeros(1, 3), vec![0.0]).unwrap();
        assert!(RepuNetwork::new(2, 1, vec![l1, l2]).is_err());
        assert!(single(1.0).forward(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn params_round_trip() {
        let mut n = single(1.5);
        let p: Vec<f64> = (0..n.param_count()).map(|i| i as f64).collect();
        n.set_params(&p).unwrap();
        assert_eq!(n.params(), p);
    }

    #[test]
    fn normalize_drops_dead_units() {
        let w1 = Matrix::from_rows(&[vec![1.0], vec![0.0], vec![2.0]]).unwrap();
        let w2 = Matrix::from_rows(&[vec![1.0, 5.0, 0.0]]).unwrap();
        let n = RepuNetwork::new(2, 1, vec![Layer::new(w1, vec![0.0; 3]).unwrap(), Layer::new(w2, vec![0.5]).unwrap()])
            .unwrap();
        let m = n.normalize();
        assert_eq!(m.complexity().activation_count, 1);
        assert_eq!(m.forward(&[0.7]).unwrap(), n.forward(&[0.7]).unwrap());
    }
}
