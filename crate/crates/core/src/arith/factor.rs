//! Factorisation of integers up to `2^80`: trial division below `10^6`,
//! a deterministic Miller-Rabin test and a seeded Pollard-Brent splitter.

use std::sync::OnceLock;

use serde::Serialize;

use super::modular::{gcd, mul_mod, pow_mod};
use crate::error::{domain, Result};

pub const TRIAL_LIMIT: u32 = 1_000_000;
pub const MAX_FACTOR_INPUT: u128 = 1u128 << 80;
pub const DEFAULT_SEED: u64 = 0x5eed_0001;

/// A positive integer with its canonical factorisation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FactoredInteger {
    pub value: u128,
    /// `(prime, exponent)` pairs in increasing prime order.
    pub factors: Vec<(u128, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger { value: 1, factors: Vec::new() }
    }

    /// Build from a factor list, checking primality and ordering.
    pub fn from_factors(mut factors: Vec<(u128, u32)>) -> Result<Self> {
        factors.sort_unstable();
        let mut value: u128 = 1;
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return domain("factor list repeats a prime");
            }
        }
        for &(p, e) in &factors {
            if e == 0 || !is_prime(p) {
                return domain(format!("invalid prime power {p}^{e}"));
            }
            value = p
                .checked_pow(e)
                .and_then(|pe| value.checked_mul(pe))
                .ok_or_else(|| crate::Error::Domain("factored value overflows".into()))?;
        }
        Ok(FactoredInteger { value, factors })
    }

    pub fn as_u64(&self) -> Option<u64> {
        u64::try_from(self.value).ok()
    }

    pub fn is_coprime_to(&self, m: u128) -> bool {
        gcd(self.value, m) == 1
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

/// All primes `<= n`, by the sieve of Eratosthenes.
pub fn primes_up_to(n: u32) -> Vec<u32> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const MR_BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Deterministic primality test, valid for all `n < 3.3 * 10^24` (beyond `2^80`).
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Canonical factorisation of `1 <= n <= 2^80` with the default splitter seed.
pub fn factor(n: u128) -> Result<FactoredInteger> {
    factor_seeded(n, DEFAULT_SEED)
}

/// Canonical factorisation; `seed` only affects the order in which the
/// Pollard-Brent splitter tries its constants, never the result.
pub fn factor_seeded(n: u128, seed: u64) -> Result<FactoredInteger> {
    if n == 0 {
        return domain("factor: input must be positive");
    }
    if n > MAX_FACTOR_INPUT {
        return Err(crate::Error::Limit { what: "factor input", value: n, limit: MAX_FACTOR_INPUT });
    }
    let mut rest = n;
    let mut factors: Vec<(u128, u32)> = Vec::new();
    for &p in small_primes() {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        let limit = TRIAL_LIMIT as u128;
        if rest < limit * limit || is_prime(rest) {
            factors.push((rest, 1));
        } else {
            let mut large = Vec::new();
            split_large(rest, seed, &mut large);
            large.sort_unstable();
            for p in large {
                match factors.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => factors.push((p, 1)),
                }
            }
        }
    }
    Ok(FactoredInteger { value: n, factors })
}

fn split_large(n: u128, seed: u64, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n, seed);
    split_large(d, seed.wrapping_add(1), out);
    split_large(n / d, seed.wrapping_add(2), out);
}

/// A nontrivial divisor of the composite `n` (no factor below `10^6`).
fn pollard_brent(n: u128, seed: u64) -> u128 {
    // SplitMix64 stream for (y0, c) pairs
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    loop {
        let c = (next() as u128) % (n - 1) + 1;
        let mut y = (next() as u128) % n;
        let f = |v: u128| (mul_mod(v, v, n) + c) % n;
        let m = 128u128;
        let (mut g, mut r, mut q) = (1u128, 1u128, 1u128);
        let (mut x, mut ys) = (0u128, 0u128);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_examples() {
        assert!(factor(1).unwrap().factors.is_empty());
        assert_eq!(factor(164).unwrap().factors, vec![(2, 2), (41, 1)]);
        assert_eq!(factor(1_000_000_007).unwrap().factors, vec![(1_000_000_007, 1)]);
        assert!(factor(0).is_err());
        assert!(factor(MAX_FACTOR_INPUT + 1).is_err());
    }

    #[test]
    fn factor_large_semiprime() {
        // two primes just above 2^39
        let p = ((1u128 << 39)..).find(|&c| is_prime(c)).unwrap();
        let q = ((p + 1)..).find(|&c| is_prime(c)).unwrap();
        let f = factor(p * q).unwrap();
        assert_eq!(f.factors, vec![(p, 1), (q, 1)]);
        assert_eq!(factor_seeded(p * q, 99).unwrap(), f);
    }

    #[test]
    fn factor_mixed() {
        let big = 1_000_000_000_039u128;
        assert!(is_prime(big));
        assert_eq!(factor(big * big).unwrap().factors, vec![(big, 2)]);
        let n = 2u128.pow(5) * 3 * 1_000_000_007 * big;
        assert_eq!(
            factor(n).unwrap().factors,
            vec![(2, 5), (3, 1), (1_000_000_007, 1), (big, 1)]
        );
    }

    #[test]
    fn primality_against_sieve() {
        let primes = primes_up_to(20_000);
        let mut idx = 0;
        for n in 0u128..20_000 {
            let want = idx < primes.len() && primes[idx] as u128 == n;
            if want {
                idx += 1;
            }
            assert_eq!(is_prime(n), want, "n={n}");
        }
        // strong pseudoprimes to several small bases
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
    }

    #[test]
    fn from_factors_roundtrip() {
        let f = FactoredInteger::from_factors(vec![(41, 1), (2, 2)]).unwrap();
        assert_eq!(f.value, 164);
        assert!(FactoredInteger::from_factors(vec![(4, 1)]).is_err());
    }
}
