//! Full-batch RMSProp fine-tuning on a mean squared loss.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::net::RepuNetwork;
use crate::num::{pairwise_sum, Fnv};

/// Number of grid points in the default one-dimensional dataset.
pub const DEFAULT_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub gamma: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub iterations: usize,
    /// Always full batch; kept so a config states it explicitly.
    pub full_batch: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { gamma: 0.99, eta: 1e-5, epsilon: 1e-8, iterations: 2000, full_batch: true }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(invalid(format!("gamma = {} must lie in (0, 1)", self.gamma)));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(invalid(format!("eta = {} must be positive", self.eta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if !self.full_batch {
            return Err(invalid("only full-batch training is supported"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<Vec<f64>>) -> Result<Self> {
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch { expected: inputs.len(), found: targets.len() });
        }
        Ok(Dataset { inputs, targets })
    }

    /// `points` equispaced inputs on `[-1, 1]` (endpoints included) with
    /// scalar targets `f(x)`.
    pub fn uniform_1d<F: Fn(f64) -> f64>(f: F, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(invalid("a uniform grid needs at least two points"));
        }
        let step = 2.0 / (points - 1) as f64;
        let xs: Vec<f64> = (0..points).map(|i| -1.0 + step * i as f64).collect();
        let targets = xs.iter().map(|&x| vec![f(x)]).collect();
        Dataset::new(xs.into_iter().map(|x| vec![x]).collect(), targets)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[Vec<f64>] {
        &self.targets
    }
}

/// `(1/M) Σ_i ‖net(x_i) − y_i‖²`.
pub fn loss_mse(net: &RepuNetwork, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(invalid("empty dataset"));
    }
    let mut terms = Vec::with_capacity(data.len());
    for (x, y) in data.inputs.iter().zip(&data.targets) {
        let out = net.forward(x)?;
        if out.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: out.len(), found: y.len() });
        }
        terms.push(out.iter().zip(y).map(|(o, t)| (o - t) * (o - t)).sum::<f64>());
    }
    Ok(pairwise_sum(&terms) / data.len() as f64)
}

/// Loss and its gradient with respect to [`RepuNetwork::params`]. Per-example
/// gradients are combined by pairwise summation, so the result does not
/// depend on anything but the data order.
pub fn loss_and_gradient(net: &RepuNetwork, data: &Dataset) -> Result<(f64, Vec<f64>)> {
    if data.is_empty() {
        return Err(invalid("empty dataset"));
    }
    let (loss, mut grad) = accumulate(net, data, 0, data.len())?;
    let m = data.len() as f64;
    for g in &mut grad {
        *g /= m;
    }
    Ok((loss / m, grad))
}

fn accumulate(net: &RepuNetwork, data: &Dataset, lo: usize, hi: usize) -> Result<(f64, Vec<f64>)> {
    if hi - lo == 1 {
        let (x, y) = (&data.inputs[lo], &data.targets[lo]);
        let out = net.forward(x)?;
        if out.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: out.len(), found: y.len() });
        }
        let residual: Vec<f64> = out.iter().zip(y).map(|(o, t)| o - t).collect();
        let upstream: Vec<f64> = residual.iter().map(|r| 2.0 * r).collect();
        let grad = net.backward(x, &upstream)?.flatten();
        return Ok((residual.iter().map(|r| r * r).sum(), grad));
    }
    let mid = lo + (hi - lo) / 2;
    let (l1, mut g1) = accumulate(net, data, lo, mid)?;
    let (l2, g2) = accumulate(net, data, mid, hi)?;
    for (a, b) in g1.iter_mut().zip(&g2) {
        *a += b;
    }
    Ok((l1 + l2, g1))
}

/// Running average of squared gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct RmsPropState {
    pub v: Vec<f64>,
}

impl RmsPropState {
    pub fn new(len: usize) -> Self {
        RmsPropState { v: vec![0.0; len] }
    }
}

/// `v ← γv + (1−γ)g²`, `θ ← θ − η g / √(v + ε)`.
pub fn rmsprop_step(params: &mut [f64], grads: &[f64], state: &mut RmsPropState, cfg: &TrainConfig) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.v.len() {
        return Err(Error::DimensionMismatch { expected: params.len(), found: grads.len().min(state.v.len()) });
    }
    for ((p, g), v) in params.iter_mut().zip(grads).zip(&mut state.v) {
        *v = cfg.gamma * *v + (1.0 - cfg.gamma) * g * g;
        *p -= cfg.eta * g / libm::sqrt(*v + cfg.epsilon);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    /// Loss before each update.
    pub losses: Vec<f64>,
    pub initial_loss: f64,
    /// Loss of the returned network.
    pub final_loss: f64,
    /// A non-finite loss or parameter stopped the run.
    pub diverged: bool,
    /// FNV-1a hash of the final parameters.
    pub fingerprint: u64,
}

impl TrainTrace {
    /// `final_loss / initial_loss`; one for a zero initial loss.
    pub fn ratio(&self) -> f64 {
        if self.initial_loss == 0.0 {
            1.0
        } else {
            self.final_loss / self.initial_loss
        }
    }
}

pub fn params_fingerprint(params: &[f64]) -> u64 {
    let mut h = Fnv::new();
    for p in params {
        h.word(p.to_bits());
    }
    h.finish()
}

/// Trains a copy of `net`. Divergence is reported in the trace, not as an
/// error; the returned network then holds the last parameters reached.
pub fn train(net: &RepuNetwork, data: &Dataset, cfg: &TrainConfig) -> Result<(TrainTrace, RepuNetwork)> {
    cfg.validate()?;
    let mut net = net.clone();
    let mut params = net.params();
    let mut state = RmsPropState::new(params.len());
    let initial_loss = loss_mse(&net, data)?;
    let mut losses = Vec::with_capacity(cfg.iterations);
    let mut diverged = !initial_loss.is_finite();
    for _ in 0..cfg.iterations {
        if diverged {
            break;
        }
        let (loss, grad) = loss_and_gradient(&net, data)?;
        losses.push(loss);
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            diverged = true;
            break;
        }
        rmsprop_step(&mut params, &grad, &mut state, cfg)?;
        net.set_params(&params)?;
        if params.iter().any(|p| !p.is_finite()) {
            diverged = true;
        }
    }
    let final_loss = if cfg.iterations == 0 { initial_loss } else { loss_mse(&net, data)? };
    if !final_loss.is_finite() {
        diverged = true;
    }
    let trace = TrainTrace { losses, initial_loss, final_loss, diverged, fingerprint: params_fingerprint(&params) };
    Ok((trace, net))
}

/// The two one-dimensional test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `exp(−x²)`.
    F1,
    /// `exp(−1/x²)`, zero at the origin.
    F2,
}

impl TestFunction {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            TestFunction::F1 => libm::exp(-x * x),
            TestFunction::F2 if x == 0.0 => 0.0,
            TestFunction::F2 => libm::exp(-1.0 / (x * x)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::F1 => "f1",
            TestFunction::F2 => "f2",
        }
    }
}

pub fn test_function(name: &str) -> Result<TestFunction> {
    match name {
        "f1" => Ok(TestFunction::F1),
        "f2" => Ok(TestFunction::F2),
        other => Err(Error::UnknownFunction(other.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    #[test]
    fn first_rmsprop_step() {
        let cfg = TrainConfig::default();
        let mut p = [0.0];
        let mut st = RmsPropState::new(1);
        rmsprop_step(&mut p, &[1.0], &mut st, &cfg).unwrap();
        assert!((st.v[0] - 0.01).abs() < 1e-15);
        assert!((p[0] + 1e-5 / libm::sqrt(0.01 + 1e-8)).abs() < 1e-18);
        rmsprop_step(&mut p, &[1.0], &mut st, &cfg).unwrap();
        assert!((st.v[0] - 0.0199).abs() < 1e-15);
        let mut q = [3.0];
        rmsprop_step(&mut q, &[0.0], &mut RmsPropState::new(1), &cfg).unwrap();
        assert_eq!(q[0], 3.0);
    }

    #[test]
    fn zero_net_on_ones() {
        let net = RepuNetwork::affine(2, Matrix::zeros(1, 1), vec![0.0]).unwrap();
        let data = Dataset::uniform_1d(|_| 1.0, 10).unwrap();
        assert_eq!(loss_mse(&net, &data).unwrap(), 1.0);
        let empty = Dataset::new(vec![], vec![]).unwrap();
        assert!(loss_mse(&net, &empty).is_err());
    }

    #[test]
    fn zero_iterations_leave_the_net_alone() {
        let net = RepuNetwork::affine(2, Matrix::identity(1), vec![0.5]).unwrap();
        let data = Dataset::uniform_1d(|x| x, 5).unwrap();
        let cfg = TrainConfig { iterations: 0, ..TrainConfig::default() };
        let (trace, out) = train(&net, &data, &cfg).unwrap();
        assert!(trace.losses.is_empty());
        assert_eq!(out, net);
        assert_eq!(trace.ratio(), 1.0);
    }

    #[test]
    fn descends_on_an_affine_toy() {
        let net = RepuNetwork::affine(2, Matrix::identity(1), vec![0.5]).unwrap();
        let data = Dataset::uniform_1d(|x| x, 5).unwrap();
        let cfg = TrainConfig { eta: 1e-3, iterations: 50, ..TrainConfig::default() };
        let (trace, _) = train(&net, &data, &cfg).unwrap();
        assert!(trace.losses.windows(2).all(|w| w[1] <= w[0]));
        assert!(trace.final_loss < trace.initial_loss);
    }

    #[test]
    fn test_functions() {
        assert_eq!(TestFunction::F1.eval(0.0), 1.0);
        assert_eq!(TestFunction::F2.eval(0.0), 0.0);
        assert!((TestFunction::F2.eval(1.0) - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!(matches!(test_function("f3"), Err(Error::UnknownFunction(_))));
    }

    #[test]
    fn bad_configs() {
        for cfg in [
            TrainConfig { gamma: 1.0, ..TrainConfig::default() },
            TrainConfig { eta: 0.0, ..TrainConfig::default() },
            TrainConfig { epsilon: -1.0, ..TrainConfig::default() },
        ] {
            assert!(cfg.validate().is_err());
        }
    }
}
