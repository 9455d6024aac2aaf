//! Finite sets of multi-indices.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSetKind {
    /// `max_i k_i ≤ n`.
    Tensor {
        n: usize,
    },
    /// `Σ_i k_i ≤ n`.
    TotalDegree {
        n: usize,
    },
    /// `Π_i max(1, k_i) ≤ n`.
    HyperbolicCross {
        n: usize,
    },
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    dim: usize,
    kind: IndexSetKind,
    indices: BTreeSet<Vec<usize>>,
}

impl IndexSet {
    pub fn tensor(n: usize, d: usize) -> Result<Self> {
        Self::generate(d, n, IndexSetKind::Tensor { n }, |k| k.iter().all(|&v| v <= n))
    }

    pub fn total_degree(n: usize, d: usize) -> Result<Self> {
        Self::generate(d, n, IndexSetKind::TotalDegree { n }, |k| k.iter().sum::<usize>() <= n)
    }

    pub fn hyperbolic_cross(n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("hyperbolic cross needs n ≥ 1"));
        }
        Self::generate(d, n, IndexSetKind::HyperbolicCross { n }, |k| {
            k.iter().try_fold(1usize, |acc, &v| acc.checked_mul(v.max(1))).is_some_and(|p| p <= n)
        })
    }

    /// Any set of multi-indices of a common dimension. Downward closure is
    /// not enforced here; see [`is_downward_closed`](Self::is_downward_closed).
    pub fn custom<I: IntoIterator<Item = Vec<usize>>>(d: usize, indices: I) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let mut set = BTreeSet::new();
        for k in indices {
            if k.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: k.len() });
            }
            set.insert(k);
        }
        if set.is_empty() {
            return Err(invalid("index set is empty"));
        }
        Ok(IndexSet { dim: d, kind: IndexSetKind::Custom, indices: set })
    }

    fn generate(d: usize, bound: usize, kind: IndexSetKind, keep: impl Fn(&[usize]) -> bool) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let mut indices = BTreeSet::new();
        let mut k = vec![0usize; d];
        fill(&mut k, 0, bound, &keep, &mut indices);
        Ok(IndexSet { dim: d, kind, indices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> IndexSetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, k: &[usize]) -> bool {
        self.indices.contains(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.indices.iter()
    }

    /// Largest degree appearing in coordinate `i`.
    pub fn max_degree(&self, i: usize) -> usize {
        self.indices.iter().map(|k| k[i]).max().unwrap_or(0)
    }

    /// True iff every index `k` has all its unit-step predecessors in the set,
    /// which is equivalent to containing every componentwise-smaller index.
    pub fn is_downward_closed(&self) -> bool {
        self.indices.iter().all(|k| {
            (0..self.dim).all(|i| {
                if k[i] == 0 {
                    return true;
                }
                let mut p = k.clone();
                p[i] -= 1;
                self.indices.contains(&p)
            })
        })
    }
}

/// Coordinates after `pos` are zero on entry; the predicates are monotone, so
/// each coordinate stops at its first rejected value.
fn fill(
    k: &mut Vec<usize>,
    pos: usize,
    bound: usize,
    keep: &impl Fn(&[usize]) -> bool,
    out: &mut BTreeSet<Vec<usize>>,
) {
    for v in 0..=bound {
        k[pos] = v;
        if !keep(k) {
            break;
        }
        if pos + 1 == k.len() {
            out.insert(k.clone());
        } else {
            fill(k, pos + 1, bound, keep, out);
        }
    }
    k[pos] = 0;
}

pub fn validate_downward_closed(set: &IndexSet) -> bool {
    set.is_downward_closed()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn generator_sizes() {
        assert_eq!(IndexSet::tensor(3, 2).unwrap().len(), 16);
        assert_eq!(IndexSet::tensor(0, 3).unwrap().len(), 1);
        for (n, d) in [(3, 2), (6, 2), (4, 3), (10, 2)] {
            assert_eq!(IndexSet::total_degree(n, d).unwrap().len(), binom(n + d, d));
        }
        // a ≤ 1 with b ≤ 3 (8 indices), plus a ∈ {2,3} with b ≤ 1 (4 indices)
        assert_eq!(IndexSet::hyperbolic_cross(3, 2).unwrap().len(), 12);
    }

    #[test]
    fn generators_are_downward_closed() {
        assert!(IndexSet::total_degree(5, 3).unwrap().is_downward_closed());
        assert!(IndexSet::hyperbolic_cross(7, 3).unwrap().is_downward_closed());
        assert!(IndexSet::tensor(2, 4).unwrap().is_downward_closed());
    }

    #[test]
    fn custom_sets() {
        let ok = IndexSet::custom(2, [vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert!(validate_downward_closed(&ok));
        let bad = IndexSet::custom(2, [vec![0, 0], vec![2, 0]]).unwrap();
        assert!(!validate_downward_closed(&bad));
        assert_eq!(bad.max_degree(0), 2);
        assert!(IndexSet::custom(2, [vec![0]]).is_err());
    }
}
