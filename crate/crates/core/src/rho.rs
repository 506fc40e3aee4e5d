//! `rho_0(d)`: roots of `v^2 + N = 0 (mod d)`;
//! `rho(d)`: pairs `(u, v) mod d` with `u^2 + N v^2 = 0 (mod d)`;
//! representation and lattice counts; the error `E_N(t) = sum_{d<=t} rho(d) - A t^2`.

use std::collections::HashMap;

use serde::Serialize;

use crate::arith::{divisors, euler_phi, factor, mobius, FactoredInteger, SpfSieve};
use crate::arith::modular::isqrt;
use crate::error::{domain, Result};
use crate::expsums::CompensatedSum;
use crate::roots::prime_power_roots;
use crate::FormParameter;

/// Largest prime power enumerated directly at a bad prime.
pub const MAX_DIRECT_MODULUS: u64 = 1 << 24;

/// `p | 2N`.
pub fn is_bad_prime(param: &FormParameter, p: u64) -> bool {
    p == 2 || param.n_u64().is_multiple_of(p)
}

pub fn rho0_prime_power(param: &FormParameter, p: u64, e: u32) -> u64 {
    prime_power_roots(param, p, e).len() as u64
}

pub fn rho0(param: &FormParameter, d: &FactoredInteger) -> u64 {
    d.factors.iter().map(|&(p, e)| rho0_prime_power(param, p as u64, e)).product()
}

/// `#{(u, v) mod m : u^2 + N v^2 = 0}` by a histogram of squares, `O(m)`.
pub fn rho_direct(param: &FormParameter, m: u64) -> Result<u64> {
    if m == 0 {
        return domain("modulus must be positive");
    }
    if m > MAX_DIRECT_MODULUS {
        return Err(crate::Error::Limit { what: "direct rho modulus", value: m as u128, limit: MAX_DIRECT_MODULUS as u128 });
    }
    let n = param.n_u64() % m;
    let mut hist = vec![0u32; m as usize];
    for u in 0..m {
        hist[(u as u128 * u as u128 % m as u128) as usize] += 1;
    }
    let mut total = 0u64;
    for v in 0..m {
        let t = (n as u128 * (v as u128 * v as u128 % m as u128)) % m as u128;
        total += hist[((m as u128 - t) % m as u128) as usize] as u64;
    }
    Ok(total)
}

/// `rho(p^a)`. At primes not dividing `2N` the closed form
/// `(a/2) phi(p^a) rho_0(p) + p^a` (even `a`) or
/// `((a+1)/2) phi(p^a) rho_0(p) + p^(a-1)` (odd `a`) is used;
/// at `p | 2N` the pairs are enumerated.
pub fn rho_prime_power(param: &FormParameter, p: u64, a: u32) -> Result<u64> {
    if a == 0 {
        return Ok(1);
    }
    if is_bad_prime(param, p) {
        let m = p.checked_pow(a).ok_or_else(|| crate::Error::Domain("prime power overflow".into()))?;
        return rho_direct(param, m);
    }
    let r0 = (1 + param.chi(p as i128)) as u64;
    let pa = p.pow(a);
    let phi = pa / p * (p - 1);
    Ok(if a.is_multiple_of(2) {
        (a as u64 / 2) * phi * r0 + pa
    } else {
        (a as u64).div_ceil(2) * phi * r0 + pa / p
    })
}

pub fn rho_full(param: &FormParameter, d: &FactoredInteger) -> Result<u64> {
    let mut acc = 1u64;
    for &(p, e) in &d.factors {
        acc = acc
            .checked_mul(rho_prime_power(param, p as u64, e)?)
            .ok_or_else(|| crate::Error::Domain("rho overflows u64".into()))?;
    }
    Ok(acc)
}

/// `sum_{a b^2 d = k, (a, d) = 1} mu^2(a) b^2 rho_0(d) phi(d)`.
pub fn convolution_identity(param: &FormParameter, k: u64) -> Result<u64> {
    if k == 0 {
        return domain("k must be positive");
    }
    let fk = factor(k as u128)?;
    let mut total = 0u64;
    for b2 in divisors(&fk).into_iter().filter(|&x| isqrt(x) * isqrt(x) == x) {
        let b = isqrt(b2) as u64;
        let g = k / b2 as u64;
        let fg = factor(g as u128)?;
        for a in divisors(&fg) {
            let a = a as u64;
            let d = g / a;
            let fa = factor(a as u128)?;
            if mobius(&fa) == 0 || crate::arith::gcd(a as u128, d as u128) != 1 {
                continue;
            }
            let fd = factor(d as u128)?;
            total += b * b * rho0(param, &fd) * euler_phi(&fd) as u64;
        }
    }
    Ok(total)
}

/// `r_N(k) = #{(n, m) : n, m >= 0, n^2 + N m^2 = k}`.
pub fn rep_count(param: &FormParameter, k: u64) -> u64 {
    let n = param.n_u64();
    let mut count = 0;
    let mut m = 0u64;
    while n * m * m <= k {
        let rest = k - n * m * m;
        let i = isqrt(rest as u128) as u64;
        if i * i == rest {
            count += 1;
        }
        m += 1;
    }
    count
}

/// `#{(i, j) in Z^2 : i^2 + N j^2 = k}`.
pub fn lattice_representations(param: &FormParameter, k: u64) -> u64 {
    let n = param.n_u64();
    let mut count = 0;
    let mut j = 0u64;
    while n * j * j <= k {
        let rest = k - n * j * j;
        let i = isqrt(rest as u128) as u64;
        if i * i == rest {
            let mult = if i == 0 { 1 } else { 2 } * if j == 0 { 1 } else { 2 };
            count += mult;
        }
        j += 1;
    }
    count
}

/// Representations of `k` by the principal form of discriminant `D`:
/// `x^2 + N y^2` for `N in {1, 2}`, `x^2 + x y + ((N + 1)/4) y^2` otherwise.
pub fn principal_form_representations(param: &FormParameter, k: u64) -> u64 {
    if !param.half_integral() {
        return lattice_representations(param, k);
    }
    // 4k = X^2 + N y^2 with X = 2x + y, so X = y (mod 2)
    let n = param.n_u64();
    let target = 4 * k;
    let mut count = 0;
    let mut y = 0u64;
    while n * y * y <= target {
        let rest = target - n * y * y;
        let x = isqrt(rest as u128) as u64;
        if x * x == rest && (x + y).is_multiple_of(2) {
            count += if x == 0 { 1 } else { 2 } * if y == 0 { 1 } else { 2 };
        }
        y += 1;
    }
    count
}

/// `sum_{d | k} chi_N(d)`.
pub fn character_divisor_sum(param: &FormParameter, k: u64) -> Result<i64> {
    let f = factor(k as u128)?;
    Ok(divisors(&f).iter().map(|&d| param.chi(d as i128) as i64).sum())
}

/// `#{(i, j) in Z^2 : i^2 + N j^2 <= x}`.
pub fn lattice_count_ellipse(param: &FormParameter, x: f64) -> Result<u64> {
    if !x.is_finite() || x < 0.0 {
        return domain("X must be finite and nonnegative");
    }
    let n = param.n() as f64;
    let mut count = 0u64;
    let mut j = 0u64;
    loop {
        let rest = x - n * (j * j) as f64;
        if rest < 0.0 {
            break;
        }
        let mut i = rest.sqrt().floor() as u64;
        while (i * i) as f64 > rest {
            i -= 1;
        }
        while ((i + 1) * (i + 1)) as f64 <= rest {
            i += 1;
        }
        count += (2 * i + 1) * if j == 0 { 1 } else { 2 };
        j += 1;
    }
    Ok(count)
}

/// Tables of `rho_0`, `rho` and prefix sums up to `limit`.
pub struct RhoTable {
    param: FormParameter,
    limit: usize,
    rho0: Vec<u32>,
    rho: Vec<u64>,
    partial: Vec<u64>,
    partial_over_d: Vec<f64>,
    partial_over_d2: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PartialSums {
    pub y: u64,
    pub sum_rho: u64,
    pub sum_rho_over_d: f64,
    pub sum_rho_over_d2: f64,
    pub e_n: f64,
}

impl RhoTable {
    pub fn build(param: &FormParameter, limit: usize) -> Result<Self> {
        if limit == 0 {
            return domain("table limit must be positive");
        }
        let sieve = SpfSieve::new(limit);
        let mut memo: HashMap<(u64, u32), (u32, u64)> = HashMap::new();
        let mut rho0 = vec![0u32; limit + 1];
        let mut rho = vec![0u64; limit + 1];
        rho0[1] = 1;
        rho[1] = 1;
        for d in 2..=limit {
            let (p, e, rest) = sieve.split_smallest(d);
            let (r0, r) = match memo.get(&(p, e)) {
                Some(&v) => v,
                None => {
                    let v = (rho0_prime_power(param, p, e) as u32, rho_prime_power(param, p, e)?);
                    memo.insert((p, e), v);
                    v
                }
            };
            rho0[d] = r0 * rho0[rest];
            rho[d] = r * rho[rest];
        }
        let mut partial = vec![0u64; limit + 1];
        let mut partial_over_d = vec![0f64; limit + 1];
        let mut partial_over_d2 = vec![0f64; limit + 1];
        let (mut s1, mut s2) = (CompensatedSum::default(), CompensatedSum::default());
        for d in 1..=limit {
            partial[d] = partial[d - 1] + rho[d];
            s1.add(rho[d] as f64 / d as f64);
            s2.add(rho[d] as f64 / (d as f64 * d as f64));
            partial_over_d[d] = s1.value();
            partial_over_d2[d] = s2.value();
        }
        Ok(RhoTable { param: *param, limit, rho0, rho, partial, partial_over_d, partial_over_d2 })
    }

    pub fn param(&self) -> &FormParameter {
        &self.param
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn rho0(&self, d: usize) -> u32 {
        self.rho0[d]
    }

    pub fn rho(&self, d: usize) -> u64 {
        self.rho[d]
    }

    /// `sum_{d <= y} rho(d)` (0 for `y = 0`).
    pub fn partial_rho(&self, y: usize) -> u64 {
        self.partial[y]
    }

    pub fn partial_sums(&self, y: u64, a: f64) -> Result<PartialSums> {
        if y == 0 || y as usize > self.limit {
            return domain(format!("y = {y} outside the table range 1..={}", self.limit));
        }
        let y_us = y as usize;
        Ok(PartialSums {
            y,
            sum_rho: self.partial[y_us],
            sum_rho_over_d: self.partial_over_d[y_us],
            sum_rho_over_d2: self.partial_over_d2[y_us],
            e_n: self.partial[y_us] as f64 - a * (y as f64).powi(2),
        })
    }

    pub fn error_function(&self, a: f64) -> ErrorFunction<'_> {
        ErrorFunction { table: self, a }
    }
}

/// `E_N(t) = sum_{d <= t} rho(d) - A t^2` for `1 <= t <= limit`.
pub struct ErrorFunction<'a> {
    table: &'a RhoTable,
    a: f64,
}

impl ErrorFunction<'_> {
    pub fn at(&self, t: f64) -> f64 {
        let k = t.floor() as usize;
        assert!(k <= self.table.limit, "t beyond table");
        self.table.partial[k] as f64 - self.a * t * t
    }

    /// `|E(y)| / (y^{4/3} log^2 y)` at an integer `y >= 3`.
    pub fn normalized(&self, y: u64) -> f64 {
        let yf = y as f64;
        self.at(yf).abs() / (yf.powf(4.0 / 3.0) * yf.ln().powi(2))
    }

    /// `safety * max_{3 <= y <= y_max} |E(y)| / (y^{4/3} log^2 y)`.
    pub fn calibrate(&self, y_max: u64, safety: f64) -> f64 {
        (3..=y_max).map(|y| self.normalized(y)).fold(0.0, f64::max) * safety
    }
}

/// `c * g(c)` for the Dirichlet coefficients `g` of `G_N(s)` at a prime power.
/// At good primes only `g(p) = -chi(p)/p` is nonzero; at bad primes the local
/// factor is `F_p(s) (1 - p^-s)(1 - chi(p) p^-s)`.
pub fn g_coefficient_scaled(param: &FormParameter, p: u64, a: u32) -> Result<i128> {
    let chi = param.chi(p as i128) as i128;
    if !is_bad_prime(param, p) {
        return Ok(match a {
            0 => 1,
            1 => -chi,
            _ => 0,
        });
    }
    let rho = |k: u32| -> Result<i128> { Ok(rho_prime_power(param, p, k)? as i128) };
    let p = p as i128;
    let mut c = rho(a)?;
    if a >= 1 {
        c -= (1 + chi) * p * rho(a - 1)?;
    }
    if a >= 2 {
        c += chi * p * p * rho(a - 2)?;
    }
    Ok(c)
}

/// Checks that the coefficient of `n^-s` in `zeta(s) L(s, chi) G_N(s)` equals
/// `rho(n)/n` for all `n <= n_max`, in exact integer arithmetic after
/// multiplying by `n`. Returns the first `n` where it fails.
pub fn dirichlet_identity_first_failure(param: &FormParameter, n_max: u64) -> Result<Option<u64>> {
    let sieve = SpfSieve::new(n_max as usize);
    let mut h = vec![0i128; n_max as usize + 1];
    let mut lambda = vec![0i128; n_max as usize + 1];
    h[1] = 1;
    lambda[1] = 1;
    let mut memo: HashMap<(u64, u32), i128> = HashMap::new();
    for m in 2..=n_max as usize {
        let (p, e, rest) = sieve.split_smallest(m);
        let hp = match memo.get(&(p, e)) {
            Some(&v) => v,
            None => {
                let v = g_coefficient_scaled(param, p, e)?;
                memo.insert((p, e), v);
                v
            }
        };
        h[m] = hp * h[rest];
        let lp: i128 = (0..=e).map(|k| param.chi(p.pow(k) as i128) as i128).sum();
        lambda[m] = lp * lambda[rest];
    }
    let table = RhoTable::build(param, n_max as usize)?;
    for n in 1..=n_max {
        let mut total = 0i128;
        let nn = n as usize;
        let mut c = 1usize;
        while c * c <= nn {
            if nn.is_multiple_of(c) {
                let c2 = nn / c;
                total += (c2 as i128) * h[c] * lambda[c2];
                if c2 != c {
                    total += (c as i128) * h[c2] * lambda[c];
                }
            }
            c += 1;
        }
        if total != table.rho(nn) as i128 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> FormParameter {
        FormParameter::new(n).unwrap()
    }

    fn f(d: u64) -> FactoredInteger {
        factor(d as u128).unwrap()
    }

    fn brute_rho(param: &FormParameter, d: u64) -> u64 {
        let n = param.n_u64();
        let mut c = 0;
        for u in 1..=d {
            for v in 1..=d {
                if (u * u + n * v * v).is_multiple_of(d) {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn examples() {
        let two = p(2);
        assert_eq!(rho0(&two, &f(9)), 2);
        assert_eq!(rho0(&two, &f(5)), 0);
        assert_eq!(rho0(&two, &f(1)), 1);
        assert_eq!(rho_prime_power(&two, 3, 2).unwrap(), 21);
        assert_eq!(rho_prime_power(&two, 5, 1).unwrap(), 1);
        assert_eq!(rho_prime_power(&two, 3, 1).unwrap(), 5);
        assert_eq!(rho_full(&two, &f(45)).unwrap(), 21);
        assert_eq!(rho_full(&two, &f(1)).unwrap(), 1);
        assert_eq!(rho_full(&two, &f(12)).unwrap(), brute_rho(&two, 12));
        assert_eq!(convolution_identity(&two, 9).unwrap(), 21);
        assert_eq!(convolution_identity(&two, 1).unwrap(), 1);
        assert_eq!(convolution_identity(&two, 45).unwrap(), 21);
        assert_eq!(rep_count(&two, 3), 1);
        assert_eq!(rep_count(&two, 4), 1);
        assert_eq!(rep_count(&two, 6), 1);
        assert_eq!(lattice_count_ellipse(&two, 10.0).unwrap(), 23);
        assert_eq!(lattice_count_ellipse(&two, 0.5).unwrap(), 1);
        assert_eq!(lattice_count_ellipse(&two, 3.0).unwrap(), 9);
    }

    #[test]
    fn small_bad_prime_powers() {
        let two = p(2);
        let v: Vec<u64> = (1..=5).map(|a| rho_prime_power(&two, 2, a).unwrap()).collect();
        assert_eq!(v, vec![2, 4, 8, 16, 32]);
    }

    #[test]
    fn rho_matches_brute_force_small() {
        for n in [1u32, 2, 3, 7, 67, 163] {
            let param = p(n);
            let table = RhoTable::build(&param, 400).unwrap();
            for d in 1..=400u64 {
                let want = brute_rho(&param, d);
                assert_eq!(rho_full(&param, &f(d)).unwrap(), want, "N={n} d={d}");
                assert_eq!(table.rho(d as usize), want);
                assert_eq!(table.rho0(d as usize) as u64, rho0(&param, &f(d)));
            }
        }
    }

    #[test]
    fn partial_sums_edges() {
        let param = p(2);
        let t = RhoTable::build(&param, 100).unwrap();
        let ps = t.partial_sums(1, 0.5).unwrap();
        assert_eq!((ps.sum_rho, ps.sum_rho_over_d, ps.sum_rho_over_d2), (1, 1.0, 1.0));
        assert!((ps.e_n - 0.5).abs() < 1e-15);
        assert!(t.partial_sums(101, 0.5).is_err());
        assert!(t.partial_sums(0, 0.5).is_err());
    }

    #[test]
    fn character_identities() {
        let two = p(2);
        for k in 1..3000u64 {
            let s = character_divisor_sum(&two, k).unwrap();
            assert_eq!(lattice_representations(&two, k) as i64, 2 * s, "k={k}");
        }
        for n in [7u32, 11, 19, 43, 67, 163] {
            let param = p(n);
            for k in 1..2000u64 {
                let s = character_divisor_sum(&param, k).unwrap();
                assert_eq!(principal_form_representations(&param, k) as i64, 2 * s, "N={n} k={k}");
            }
        }
        // the Z[sqrt(-67)] lattice misses half of the norms
        let param = p(67);
        assert_eq!(character_divisor_sum(&param, 17).unwrap(), 2);
        assert_eq!(lattice_representations(&param, 17), 0);
    }

    #[test]
    fn dirichlet_identity_small() {
        for n in [1u32, 2, 3, 7, 67, 163] {
            assert_eq!(dirichlet_identity_first_failure(&p(n), 500).unwrap(), None, "N={n}");
        }
    }
}
