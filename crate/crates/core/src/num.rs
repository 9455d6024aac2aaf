//! Float helpers missing from `core`.

pub(crate) fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Integer `base^exp`, panicking on overflow.
pub(crate) fn ipow(base: usize, exp: u32) -> usize {
    base.checked_pow(exp).expect("integer power overflow")
}

/// Smallest `k` with `s^(k+1) > n`, i.e. `floor(log_s n)` for `n ≥ 1`.
pub(crate) fn level_for_degree(n: usize, s: usize) -> u32 {
    let mut k = 0u32;
    while ipow(s, k + 1) <= n {
        k += 1;
    }
    k
}

/// 64-bit FNV-1a, used for reproducibility fingerprints.
pub(crate) struct Fnv(u64);

impl Fnv {
    pub(crate) fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn bytes(&mut self, data: &[u8]) {
        for b in data {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub(crate) fn word(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

/// Pairwise summation; deterministic for a given slice order.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_matches_floor_log() {
        assert_eq!(level_for_degree(1, 2), 0);
        assert_eq!(level_for_degree(3, 2), 1);
        assert_eq!(level_for_degree(4, 2), 2);
        assert_eq!(level_for_degree(10, 3), 2);
        assert_eq!(level_for_degree(9, 3), 2);
        assert_eq!(level_for_degree(8, 3), 1);
    }

    #[test]
    fn powi_small_cases() {
        assert_eq!(powi(3.0, 0), 1.0);
        assert_eq!(powi(-2.0, 3), -8.0);
        assert_eq!(powi(0.5, 4), 0.0625);
    }
}
