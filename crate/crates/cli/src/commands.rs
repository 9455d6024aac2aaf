//! The six subcommands. Each returns its artifacts and a summary; writing
//! files and printing are left to [`crate::run`].

use std::path::PathBuf;

use chebnet_core::cheb::{ChebExpansion, LegendreExpansion, MonomialExpansion};
use chebnet_core::conditioning::{coefficient_magnitudes, cond_table_general_s, cond_table_s2, CondRow};
use chebnet_core::construct::{
    build_chebnet_1d, build_chebnet_1d_general, build_chebnet_downward_closed, build_chebnet_tensor,
    build_chebnet_total_degree, build_powernet_1d, ConstructionReceipt,
};
use chebnet_core::net::RepuNetwork;
use chebnet_core::train::{train, Dataset, TrainConfig};
use chebnet_core::IndexSetKind;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::formats::{save_network, sig, Basis, Expansion};
use crate::target::Target;

/// Points used for residuals and construction errors.
pub const CHECK_POINTS: usize = 1000;
/// Largest `N` accepted by `cond` without `--long`.
pub const DESK_CAP: usize = 500;

/// A file produced by a command. `path == None` marks the primary artifact,
/// which goes to `--output` or stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// Ordered `(key, value)` pairs for the human or JSON summary.
    pub summary: Vec<(String, Value)>,
}

impl Outcome {
    fn new(primary: String) -> Self {
        Outcome { artifacts: vec![Artifact { path: None, contents: primary }], summary: Vec::new() }
    }

    fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.push((key.to_string(), value.into()));
    }
}

/// `M` equispaced points on `[-1, 1]`, endpoints included.
pub fn grid(m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..m).map(|i| -1.0 + 2.0 * i as f64 / (m - 1) as f64).collect(),
    }
}

/// Deterministic points filling `[-1, 1]^d` (additive recurrence on the
/// generalized golden ratio).
pub fn lattice(d: usize, m: usize) -> Vec<Vec<f64>> {
    // root of phi^(d+1) = phi + 1
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=d).map(|k| (1.0 / phi.powi(k as i32)).fract()).collect();
    (1..=m).map(|i| alpha.iter().map(|a| 2.0 * (0.5 + a * i as f64).fract() - 1.0).collect()).collect()
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Invalid(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Invalid(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn full(v: f64) -> String {
    sig(v, 17)
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxBasis {
    Chebyshev,
    Legendre,
}

pub fn approx(target: &Target, basis: ApproxBasis, n: usize) -> Result<Outcome, CliError> {
    let f = |x: f64| target.eval(x);
    let expansion = match basis {
        ApproxBasis::Chebyshev => Expansion::Chebyshev(ChebExpansion::interpolate(f, n)?),
        ApproxBasis::Legendre => Expansion::Legendre(LegendreExpansion::project(f, n)?),
    };
    let mut residual: f64 = 0.0;
    for x in grid(CHECK_POINTS) {
        residual = residual.max((f(x) - expansion.eval(&[x])?).abs());
    }
    let mut out = Outcome::new(crate::formats::save_expansion(&expansion)?);
    out.put("function", target.name());
    out.put("basis", if basis == ApproxBasis::Chebyshev { "chebyshev" } else { "legendre" });
    out.put("degree", n);
    out.put("coefficients", n + 1);
    out.put("max_residual", finite_or_null(residual));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetKind {
    ChebNet,
    PowerNet,
}

pub fn construct(expansion: &Expansion, kind: NetKind, s: usize, via_monomial: bool) -> Result<Outcome, CliError> {
    let receipt = match kind {
        NetKind::ChebNet => {
            if via_monomial {
                return Err(CliError::Invalid("--via-monomial only applies to powernet".into()));
            }
            build_chebnet(expansion, s)?
        }
        NetKind::PowerNet => {
            if s != 2 {
                return Err(CliError::Invalid("powernet is built for s = 2 only".into()));
            }
            let monomial = match (expansion, via_monomial) {
                (Expansion::Monomial(m), _) => m.clone(),
                (Expansion::Legendre(l), true) => l.to_monomial(),
                (Expansion::Chebyshev(c), true) => MonomialExpansion::new(c.to_monomial_coeffs())?,
                (e, _) => {
                    return Err(CliError::Invalid(format!(
                        "powernet needs a monomial expansion, got {} (use --via-monomial)",
                        basis_name(e.basis())
                    )))
                }
            };
            build_powernet_1d(&monomial)?
        }
    };
    let net = &receipt.network;
    let error = construction_error(net, expansion)?;
    let c = receipt.complexity();
    let mut out = Outcome::new(save_network(net)?);
    out.put("kind", if kind == NetKind::ChebNet { "chebnet" } else { "powernet" });
    out.put("s", s);
    out.put("input_dim", net.input_dim());
    out.put("hidden_layers", c.hidden_layers);
    out.put("predicted_depth", receipt.predicted_depth);
    out.put("activation_count", c.activation_count);
    out.put("activation_bound", receipt.activation_bound);
    out.put("nonzero_weights", c.nonzero_weights);
    out.put("nonzero_bound", receipt.nonzero_bound);
    out.put("within_bounds", receipt.within_bounds());
    out.put("max_construction_error", finite_or_null(error));
    out.put("fingerprint", format!("{:016x}", receipt.fingerprint));
    Ok(out)
}

fn basis_name(b: Basis) -> &'static str {
    match b {
        Basis::Chebyshev => "chebyshev",
        Basis::Legendre => "legendre",
        Basis::Monomial => "monomial",
    }
}

fn build_chebnet(expansion: &Expansion, s: usize) -> Result<ConstructionReceipt, CliError> {
    match expansion {
        Expansion::Chebyshev(e) if s == 2 => Ok(build_chebnet_1d(e)?),
        Expansion::Chebyshev(e) => Ok(build_chebnet_1d_general(e, s)?),
        Expansion::MultiChebyshev(m) => {
            if s != 2 {
                return Err(CliError::Invalid("multivariate chebnet is built for s = 2 only".into()));
            }
            Ok(match m.index_set().kind() {
                IndexSetKind::TotalDegree { .. } => build_chebnet_total_degree(m)?,
                IndexSetKind::Tensor { .. } => build_chebnet_tensor(m)?,
                _ => build_chebnet_downward_closed(m)?,
            })
        }
        e => Err(CliError::Invalid(format!("chebnet needs a chebyshev expansion, got {}", basis_name(e.basis())))),
    }
}

/// Max `|net − expansion|` over [`CHECK_POINTS`] points.
pub fn construction_error(net: &RepuNetwork, expansion: &Expansion) -> Result<f64, CliError> {
    let points: Vec<Vec<f64>> = match expansion.dim() {
        1 => grid(CHECK_POINTS).into_iter().map(|x| vec![x]).collect(),
        d => lattice(d, CHECK_POINTS),
    };
    let mut err: f64 = 0.0;
    for x in &points {
        let got = net.forward(x)?[0];
        err = err.max((got - expansion.eval(x)?).abs());
    }
    Ok(err)
}

pub fn cond(s_values: &[usize], ns: &[usize], long: bool) -> Result<Outcome, CliError> {
    if let Some(n) = ns.iter().find(|&&n| n > DESK_CAP) {
        if !long {
            return Err(CliError::Invalid(format!("N = {n} exceeds {DESK_CAP}; pass --long to allow it")));
        }
    }
    let mut rows: Vec<CondRow> = Vec::new();
    for &s in s_values {
        rows.extend(if s == 2 { cond_table_s2(ns)? } else { cond_table_general_s(&[s], ns)? });
    }
    let four = |v: f64| sig(v, 4);
    let text = csv_text(
        &["s", "N", "kappa_B", "kappa_H"],
        rows.iter()
            .map(|r| vec![r.s.to_string(), r.n.to_string(), r.kappa_b.map(four).unwrap_or_default(), four(r.kappa_h)]),
    )?;
    // the JSON mirror carries the same rounded values
    let rounded = |v: f64| -> Value {
        if v.is_finite() {
            json!(four(v).parse::<f64>().expect("formatted float"))
        } else {
            Value::Null
        }
    };
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| json!({"s": r.s, "N": r.n, "kappa_B": r.kappa_b.map(rounded), "kappa_H": rounded(r.kappa_h)}))
        .collect();
    let mut out = Outcome::new(text);
    out.put("rows", Value::Array(json_rows));
    Ok(out)
}

pub struct TrainRequest<'a> {
    pub network: &'a RepuNetwork,
    pub target: &'a Target,
    pub points: usize,
    pub config: TrainConfig,
    /// Where the trained network goes.
    pub trained_path: Option<PathBuf>,
}

pub fn train_cmd(req: TrainRequest<'_>) -> Result<Outcome, CliError> {
    if req.network.input_dim() != 1 || req.network.output_dim() != 1 {
        return Err(CliError::Invalid("training uses scalar networks on [-1, 1]".into()));
    }
    let data = Dataset::uniform_1d(|x| req.target.eval(x), req.points)?;
    let (trace, trained) = train(req.network, &data, &req.config)?;
    let text =
        csv_text(&["iteration", "loss"], trace.losses.iter().enumerate().map(|(i, l)| vec![i.to_string(), full(*l)]))?;
    let mut out = Outcome::new(text);
    if let Some(path) = req.trained_path {
        out.artifacts.push(Artifact { path: Some(path), contents: save_network(&trained)? });
    }
    out.put("function", req.target.name());
    out.put("points", req.points);
    out.put("iterations", trace.losses.len());
    out.put("initial_loss", finite_or_null(trace.initial_loss));
    out.put("final_loss", finite_or_null(trace.final_loss));
    out.put("ratio", finite_or_null(trace.ratio()));
    out.put("diverged", trace.diverged);
    out.put("fingerprint", format!("{:016x}", trace.fingerprint));
    Ok(out)
}

pub fn coeffs(target: &Target, n: usize) -> Result<Outcome, CliError> {
    let r = coefficient_magnitudes(|x| target.eval(x), n)?;
    let text = csv_text(
        &["j", "legendre", "monomial", "chebyshev", "hierarchical"],
        (0..=n).map(|j| {
            vec![j.to_string(), full(r.legendre[j]), full(r.monomial[j]), full(r.chebyshev[j]), full(r.hierarchical[j])]
        }),
    )?;
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut out = Outcome::new(text);
    out.put("function", target.name());
    out.put("degree", n);
    out.put("max_abs_legendre", finite_or_null(max_abs(&r.legendre)));
    out.put("max_abs_monomial", finite_or_null(max_abs(&r.monomial)));
    out.put("max_abs_chebyshev", finite_or_null(max_abs(&r.chebyshev)));
    out.put("max_abs_hierarchical", finite_or_null(max_abs(&r.hierarchical)));
    Ok(out)
}

pub fn eval(net: &RepuNetwork, points: &[Vec<f64>], reference: Option<&Expansion>) -> Result<Outcome, CliError> {
    let d = net.input_dim();
    let mut header: Vec<String> = if d == 1 { vec!["x".into()] } else { (0..d).map(|i| format!("x{i}")).collect() };
    header.extend((0..net.output_dim()).map(|i| if net.output_dim() == 1 { "y".into() } else { format!("y{i}") }));
    let mut rows = Vec::with_capacity(points.len());
    let mut err: f64 = 0.0;
    for x in points {
        let y = net.forward(x)?;
        if let Some(e) = reference {
            err = err.max((y[0] - e.eval(x)?).abs());
        }
        rows.push(x.iter().chain(&y).map(|v| full(*v)).collect());
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut out = Outcome::new(csv_text(&header, rows)?);
    out.put("points", points.len());
    if reference.is_some() {
        out.put("max_error", finite_or_null(err));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(grid(3), vec![-1.0, 0.0, 1.0]);
        let pts = lattice(3, 50);
        assert!(pts.iter().flatten().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn cond_csv_shape() {
        let out = cond(&[2], &[], false).unwrap();
        assert_eq!(out.artifacts[0].contents, "s,N,kappa_B,kappa_H\n");
        assert!(cond(&[2], &[501], false).is_err());
    }
}
