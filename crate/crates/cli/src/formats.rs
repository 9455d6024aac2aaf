//! JSON files for expansions and networks, plus float formatting.
//!
//! JSON floats are written with 17 significant digits, which round-trips
//! every `f64` exactly.

use std::collections::BTreeMap;
use std::io;

use chebnet_core::cheb::{ChebExpansion, LegendreExpansion, MonomialExpansion, MultiChebExpansion};
use chebnet_core::net::{Layer, RepuNetwork};
use chebnet_core::{IndexSet, IndexSetKind, Matrix};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};

use crate::error::CliError;

/// `serde_json` formatter printing floats as `{:.16e}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes with [`SeventeenDigits`]; non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SeventeenDigits);
    value.serialize(&mut ser).map_err(|e| CliError::Invalid(format!("json encoding: {e}")))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("json is utf-8"))
}

/// `v` with `digits` significant digits in scientific notation.
pub fn sig(v: f64, digits: usize) -> String {
    if v.is_finite() {
        format!("{:.*e}", digits.saturating_sub(1), v)
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerFile {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub s: u32,
    pub input_dim: usize,
    pub layers: Vec<LayerFile>,
}

impl From<&RepuNetwork> for NetworkFile {
    fn from(net: &RepuNetwork) -> Self {
        NetworkFile {
            s: net.s(),
            input_dim: net.input_dim(),
            layers: net.layers().iter().map(|l| LayerFile { a: l.weights.to_rows(), b: l.bias.clone() }).collect(),
        }
    }
}

impl NetworkFile {
    pub fn into_network(self) -> Result<RepuNetwork, CliError> {
        let mut layers = Vec::with_capacity(self.layers.len());
        let mut cols = self.input_dim;
        for (k, l) in self.layers.into_iter().enumerate() {
            // an empty row list still has to know its width
            let weights = if l.a.is_empty() {
                Matrix::zeros(0, cols)
            } else {
                Matrix::from_rows(&l.a).map_err(|e| CliError::Invalid(format!("layer {k}: {e}")))?
            };
            cols = weights.rows();
            layers.push(Layer::new(weights, l.b).map_err(|e| CliError::Invalid(format!("layer {k}: {e}")))?);
        }
        RepuNetwork::new(self.s, self.input_dim, layers).map_err(|e| CliError::Invalid(format!("network: {e}")))
    }
}

pub fn save_network(net: &RepuNetwork) -> Result<String, CliError> {
    to_json(&NetworkFile::from(net))
}

pub fn load_network(text: &str) -> Result<RepuNetwork, CliError> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("network json: {e}")))?;
    file.into_network()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Chebyshev,
    Legendre,
    Monomial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexSetSpec {
    Tensor {
        n: usize,
    },
    TotalDegree {
        n: usize,
    },
    HyperbolicCross {
        n: usize,
    },
    /// The indices present in `coeffs`.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub index: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeffs {
    Dense(Vec<f64>),
    Sparse(Vec<Term>),
}

/// `{"basis", "dim", "index_set"?, "coeffs"}`. One-dimensional expansions
/// store a dense list; multivariate ones a list of `{index, value}` terms
/// over `index_set`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFile {
    pub basis: Basis,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_set: Option<IndexSetSpec>,
    pub coeffs: Coeffs,
}

/// A parsed expansion file.
#[derive(Debug, Clone, PartialEq)]
pub enum Expansion {
    Chebyshev(ChebExpansion),
    Legendre(LegendreExpansion),
    Monomial(MonomialExpansion),
    MultiChebyshev(MultiChebExpansion),
}

impl Expansion {
    pub fn basis(&self) -> Basis {
        match self {
            Expansion::Chebyshev(_) | Expansion::MultiChebyshev(_) => Basis::Chebyshev,
            Expansion::Legendre(_) => Basis::Legendre,
            Expansion::Monomial(_) => Basis::Monomial,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Expansion::MultiChebyshev(m) => m.dim(),
            _ => 1,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, CliError> {
        match self {
            Expansion::Chebyshev(e) => Ok(e.eval(x[0])),
            Expansion::Legendre(e) => Ok(e.eval(x[0])),
            Expansion::Monomial(e) => Ok(e.eval(x[0])),
            Expansion::MultiChebyshev(m) => Ok(m.eval(x)?),
        }
    }

    pub fn to_file(&self) -> ExpansionFile {
        let dense =
            |basis, c: &[f64]| ExpansionFile { basis, dim: 1, index_set: None, coeffs: Coeffs::Dense(c.to_vec()) };
        match self {
            Expansion::Chebyshev(e) => dense(Basis::Chebyshev, e.coeffs()),
            Expansion::Legendre(e) => dense(Basis::Legendre, e.coeffs()),
            Expansion::Monomial(e) => dense(Basis::Monomial, e.coeffs()),
            Expansion::MultiChebyshev(m) => ExpansionFile {
                basis: Basis::Chebyshev,
                dim: m.dim(),
                index_set: Some(match m.index_set().kind() {
                    IndexSetKind::Tensor { n } => IndexSetSpec::Tensor { n },
                    IndexSetKind::TotalDegree { n } => IndexSetSpec::TotalDegree { n },
                    IndexSetKind::HyperbolicCross { n } => IndexSetSpec::HyperbolicCross { n },
                    IndexSetKind::Custom => IndexSetSpec::Custom,
                }),
                coeffs: Coeffs::Sparse(m.coeffs().iter().map(|(k, v)| Term { index: k.clone(), value: *v }).collect()),
            },
        }
    }

    pub fn from_file(file: ExpansionFile) -> Result<Expansion, CliError> {
        let invalid = |m: String| CliError::Invalid(m);
        match (file.dim, file.coeffs) {
            (1, Coeffs::Dense(c)) => Ok(match file.basis {
                Basis::Chebyshev => Expansion::Chebyshev(ChebExpansion::new(c)?),
                Basis::Legendre => Expansion::Legendre(LegendreExpansion::new(c)?),
                Basis::Monomial => Expansion::Monomial(MonomialExpansion::new(c)?),
            }),
            (0, _) => Err(invalid("dim must be at least 1".into())),
            (d, Coeffs::Sparse(terms)) => {
                if file.basis != Basis::Chebyshev {
                    return Err(invalid("multivariate expansions must use the chebyshev basis".into()));
                }
                if terms.iter().any(|t| t.index.len() != d) {
                    return Err(invalid(format!("every index must have {d} entries")));
                }
                let coeffs: BTreeMap<Vec<usize>, f64> = terms.into_iter().map(|t| (t.index, t.value)).collect();
                let set = match file.index_set.unwrap_or(IndexSetSpec::Custom) {
                    IndexSetSpec::Tensor { n } => IndexSet::tensor(n, d)?,
                    IndexSetSpec::TotalDegree { n } => IndexSet::total_degree(n, d)?,
                    IndexSetSpec::HyperbolicCross { n } => IndexSet::hyperbolic_cross(n, d)?,
                    IndexSetSpec::Custom => IndexSet::custom(d, coeffs.keys().cloned())?,
                };
                Ok(Expansion::MultiChebyshev(MultiChebExpansion::new(set, coeffs)?))
            }
            (d, Coeffs::Dense(_)) => Err(invalid(format!("a {d}-dimensional expansion needs index/value terms"))),
        }
    }
}

pub fn save_expansion(e: &Expansion) -> Result<String, CliError> {
    to_json(&e.to_file())
}

pub fn load_expansion(text: &str) -> Result<Expansion, CliError> {
    let file: ExpansionFile =
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("expansion json: {e}")))?;
    Expansion::from_file(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_every_bit() {
        let v = vec![0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0];
        let text = to_json(&v).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(v, back);
        assert!(text.contains("1.0000000000000001e-1"));
        assert_eq!(to_json(&f64::INFINITY).unwrap(), "null\n");
    }

    #[test]
    fn sig_digits() {
        assert_eq!(sig(12.3456, 4), "1.235e1");
        assert_eq!(sig(f64::INFINITY, 4), "inf");
    }

    #[test]
    fn expansion_round_trip() {
        let e = Expansion::Legendre(LegendreExpansion::new(vec![1.0, 0.5, -0.25]).unwrap());
        assert_eq!(load_expansion(&save_expansion(&e).unwrap()).unwrap(), e);
        let set = IndexSet::total_degree(2, 2).unwrap();
        let m = MultiChebExpansion::from_fn(set, |k| (k[0] + 2 * k[1]) as f64);
        let e = Expansion::MultiChebyshev(m);
        assert_eq!(load_expansion(&save_expansion(&e).unwrap()).unwrap(), e);
    }

    #[test]
    fn malformed_networks_are_rejected() {
        assert!(load_network("{}").is_err());
        let bad = r#"{"s":2,"input_dim":1,"layers":[{"A":[[1.0,2.0]],"b":[0.0]}]}"#;
        assert!(load_network(bad).is_err());
    }
}
