//! Classical multiplicative functions and divisor sums.

use super::factor::{factor, FactoredInteger};
use super::modular::{gcd, isqrt};
use crate::error::{domain, Result};

pub fn mobius(n: &FactoredInteger) -> i8 {
    if n.factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if n.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: &FactoredInteger) -> u128 {
    n.factors
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

pub fn divisor_count(n: &FactoredInteger) -> u128 {
    n.factors.iter().map(|&(_, e)| e as u128 + 1).product()
}

/// All positive divisors, unsorted.
pub fn divisors(n: &FactoredInteger) -> Vec<u128> {
    let mut out = vec![1u128];
    for &(p, e) in &n.factors {
        let len = out.len();
        let mut pk = 1u128;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out
}

/// Ramanujan sum `c_d(w) = sum_{s | (w, d)} s * mu(d / s)`.
pub fn ramanujan_sum(w: i128, d: u64) -> Result<i128> {
    if d == 0 {
        return domain("ramanujan_sum: modulus must be positive");
    }
    let g = gcd(w.unsigned_abs() % d as u128, d as u128);
    let g = if g == 0 { d as u128 } else { g };
    let gf = factor(g)?;
    let mut total = 0i128;
    for s in divisors(&gf) {
        let mu = mobius(&factor(d as u128 / s)?);
        total += s as i128 * mu as i128;
    }
    Ok(total)
}

/// `sum_{n <= x} d(n)` by the hyperbola method in `O(sqrt x)`.
pub fn dirichlet_divisor_sum(x: u64) -> Result<u128> {
    if x == 0 {
        return domain("dirichlet_divisor_sum: x must be positive");
    }
    let r = isqrt(x as u128);
    let mut s = 0u128;
    for k in 1..=r {
        s += x as u128 / k;
    }
    Ok(2 * s - r * r)
}

/// Smallest-prime-factor table for fast factorisation of `n <= limit`.
pub struct SpfSieve {
    spf: Vec<u32>,
}

impl SpfSieve {
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfSieve { spf }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn smallest(&self, n: usize) -> u32 {
        self.spf[n]
    }

    /// Prime factorisation of `1 <= n <= limit` as `(p, e)` pairs.
    pub fn factor(&self, mut n: usize) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n] as usize;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        out
    }

    /// Split `n = p^e * rest` with `p` the smallest prime factor of `n > 1`.
    pub fn split_smallest(&self, n: usize) -> (u64, u32, usize) {
        let p = self.spf[n] as usize;
        let mut rest = n;
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        (p as u64, e, rest)
    }
}
