//! Modular arithmetic on `u128` residues: products, powers, inverses,
//! Kronecker symbol, square roots modulo primes, Hensel lifting and CRT.

use crate::error::{domain, Result};

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Floor square root of a `u128`.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    // the float guess is within a few units; settle exactly
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn isqrt_u64(n: u64) -> u64 {
    isqrt(n as u128) as u64
}

pub fn is_square(n: u128) -> Option<u128> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

/// `a * b mod m` without overflow for any `m < 2^127`.
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    let (a, b) = (a % m, b % m);
    if m <= u64::MAX as u128 {
        return a * b % m;
    }
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    // double-and-add; a, b < m < 2^127 so the sums never overflow
    let mut acc = 0u128;
    let mut base = a;
    let mut e = b;
    while e > 0 {
        if e & 1 == 1 {
            acc += base;
            if acc >= m {
                acc -= m;
            }
        }
        base += base;
        if base >= m {
            base -= m;
        }
        e >>= 1;
    }
    acc
}

pub fn pow_mod(base: u128, mut e: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut b = base % m;
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Reduce a signed integer into `[0, m)`.
pub fn reduce(a: i128, m: u128) -> u128 {
    let m_i = m as i128;
    a.rem_euclid(m_i) as u128
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| reduce(old_s, m))
}

/// Kronecker symbol `(a / n)`.
///
/// Conventions: `(a/0) = 1` iff `a = +-1`; `(a/-1)` is the sign of `a`
/// (with `(0/-1) = 1`); `(a/2)` is `0` for even `a` and otherwise `+1`
/// or `-1` according to `a mod 8`.
pub fn kronecker(a: i128, n: i128) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result: i8 = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        n >>= twos;
        if twos % 2 == 1 {
            let r8 = a.rem_euclid(8);
            if r8 == 3 || r8 == 5 {
                result = -result;
            }
        }
    }
    // n is now odd and positive: Jacobi symbol
    let mut a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 {
            let r8 = n % 8;
            if r8 == 3 || r8 == 5 {
                result = -result;
            }
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        (a, n) = (n % a, a);
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Square roots of `a` modulo the prime `p`.
///
/// Returns `None` for a non-residue, otherwise `(v, p - v)` with `v <= p - v`
/// (`(0, 0)` when `p | a`). Uses Tonelli-Shanks with the smallest non-residue.
pub fn sqrt_mod(a: i128, p: u128) -> Result<Option<(u128, u128)>> {
    if !super::factor::is_prime(p) {
        return domain(format!("sqrt_mod: modulus {p} is not prime"));
    }
    let a = reduce(a, p);
    if a == 0 {
        return Ok(Some((0, 0)));
    }
    if p == 2 {
        return Ok(Some((1, 1)));
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return Ok(None);
    }
    let root = tonelli_shanks(a, p);
    let other = p - root;
    Ok(Some((root.min(other), root.max(other))))
}

fn tonelli_shanks(a: u128, p: u128) -> u128 {
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2u128;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1u128 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Lift `root` (a square root of `a` mod `p`) to the unique square root of
/// `a` modulo `p^k` congruent to `root` mod `p`.
pub fn hensel_lift(root: i128, a: i128, p: u128, k: u32) -> Result<u128> {
    if k == 0 {
        return domain("hensel_lift: exponent must be at least 1");
    }
    let pk = p
        .checked_pow(k)
        .filter(|v| *v < (1u128 << 126))
        .ok_or_else(|| crate::Error::Domain(format!("hensel_lift: {p}^{k} too large")))?;
    let r0 = reduce(root, p);
    if mul_mod(r0, r0, p) != reduce(a, p) {
        return domain(format!("hensel_lift: {root} is not a square root of {a} mod {p}"));
    }
    if mul_mod(2, r0, p) == 0 {
        return domain(format!("hensel_lift: derivative 2*{root} vanishes mod {p}"));
    }
    let mut w = r0;
    let mut modulus = p;
    for _ in 1..k {
        modulus *= p;
        // w <- w - (w^2 - a) / (2w)  mod p^j
        let a_m = reduce(a, modulus);
        let f = (mul_mod(w, w, modulus) + modulus - a_m) % modulus;
        let inv = mod_inverse(mul_mod(2, w, modulus), modulus)
            .expect("2w is a unit when p does not divide 2*root");
        w = (w + modulus - mul_mod(f, inv, modulus)) % modulus;
    }
    debug_assert_eq!(modulus, pk);
    Ok(w)
}

/// Combine congruences `x = v_i (mod m_i)` with pairwise coprime moduli.
/// Returns `(x, prod m_i)` with `0 <= x < prod m_i`.
pub fn crt_combine(residues: &[(u128, u128)]) -> Result<(u128, u128)> {
    let mut x = 0u128;
    let mut m = 1u128;
    for &(v, mi) in residues {
        if mi == 0 {
            return domain("crt_combine: zero modulus");
        }
        if gcd(m, mi) != 1 {
            return domain(format!("crt_combine: modulus {mi} is not coprime to {m}"));
        }
        let new_m = m
            .checked_mul(mi)
            .filter(|v| *v < (1u128 << 126))
            .ok_or_else(|| crate::Error::Domain("crt_combine: product modulus too large".into()))?;
        let inv = mod_inverse(m % mi, mi).expect("coprime moduli");
        // x + m * t with t = (v - x) * m^{-1} mod mi
        let diff = (v % mi + mi - x % mi) % mi;
        let t = mul_mod(diff, inv, mi);
        x = (x + mul_mod(m, t, new_m)) % new_m;
        m = new_m;
    }
    Ok((x, m))
}

/// CRT for two coprime `u64` moduli; the hot path used by root tables.
#[inline]
pub fn crt_pair(v1: u64, m1: u64, v2: u64, m2: u64, m1_inv_mod_m2: u64) -> u64 {
    let diff = (v2 as u128 + m2 as u128 - (v1 % m2) as u128) % m2 as u128;
    let t = diff * m1_inv_mod_m2 as u128 % m2 as u128;
    (v1 as u128 + m1 as u128 * t) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-8, 3), 1);
        assert_eq!(kronecker(-8, 5), -1);
        for a in -20..20 {
            assert_eq!(kronecker(a, 1), 1);
        }
        assert_eq!(kronecker(-67, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-8, 2), 0);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(5, -1), 1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3u128, 5, 7, 11, 13, 101, 163] {
            for a in 0..p {
                let e = pow_mod(a, (p - 1) / 2, p);
                let want = if a == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(kronecker(a as i128, p as i128), want, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn sqrt_mod_examples() {
        assert_eq!(sqrt_mod(-2, 17).unwrap(), Some((7, 10)));
        assert_eq!(sqrt_mod(1, 5).unwrap(), Some((1, 4)));
        assert_eq!(sqrt_mod(3, 5).unwrap(), None);
        assert!(sqrt_mod(3, 15).is_err());
    }

    #[test]
    fn hensel_examples() {
        assert_eq!(hensel_lift(1, -2, 3, 2).unwrap(), 4);
        assert_eq!(hensel_lift(7, -2, 17, 1).unwrap(), 7);
        assert_eq!(hensel_lift(4, -2, 3, 3).unwrap(), 22);
        assert!(hensel_lift(0, 0, 3, 2).is_err());
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_combine(&[(1, 3), (2, 5)]).unwrap(), (7, 15));
        assert_eq!(crt_combine(&[(0, 7)]).unwrap(), (0, 7));
        assert_eq!(crt_combine(&[(4, 9), (7, 17)]).unwrap(), (58, 153));
        assert!(crt_combine(&[(1, 6), (1, 4)]).is_err());
    }

    #[test]
    fn mul_mod_wide() {
        let m = (1u128 << 80) - 65;
        let a = m - 1;
        // (-1)^2 = 1
        assert_eq!(mul_mod(a, a, m), 1);
        let b = (1u128 << 79) + 12345;
        let c = (1u128 << 78) + 999;
        // compare against a split computation: b*c = b*(c_hi*2^40 + c_lo)
        let (c_hi, c_lo) = (c >> 40, c & ((1 << 40) - 1));
        let t = mul_mod(mul_mod(b, c_hi, m), 1u128 << 40, m);
        assert_eq!(mul_mod(b, c, m), (t + mul_mod(b, c_lo, m)) % m);
    }

    #[test]
    fn isqrt_edges() {
        for n in 0u128..2000 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        let big = u128::MAX;
        let r = isqrt(big);
        assert!(r.checked_mul(r).unwrap() <= big);
        assert!((r + 1).checked_mul(r + 1).is_none());
    }
}
