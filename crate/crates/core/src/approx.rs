//! Rational approximations `a/q` to `v/d` (with `v^2 + N = 0 mod d`) such
//! that `|v/d - a/q| <= 1/q^2` and `q` is of order `sqrt(d)`.
//!
//! A root `v` comes with integers `(r, s)`, `s v = r (mod d)` and
//! `r^2 + N s^2 = c d`. Clearing denominators gives two candidates:
//! `v/d - t/s = r/(d s)` and `v/d - u/r = -N s/(d r)`. The first is used
//! when `|s| >= gamma |r|` with `gamma = 1/(2 sqrt N)`, the second otherwise.
//! Every result is re-checked in integer arithmetic; if the check fails the
//! largest admissible `q <= ceil(2 sqrt d)` is found by search and the
//! result is flagged.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::modular::{gcd_u64, isqrt, mod_inverse};
use crate::arith::factor;
use crate::error::{domain, Result};
use crate::roots::{representations_of, roots_by_lifting, witnesses, RootWitness};
use crate::FormParameter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ApproxBranch {
    SDenominator,
    RDenominator,
    NDividesD,
    EvenD,
}

impl ApproxBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            ApproxBranch::SDenominator => "sDenominator",
            ApproxBranch::RDenominator => "rDenominator",
            ApproxBranch::NDividesD => "nDividesD",
            ApproxBranch::EvenD => "evenD",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RationalApprox {
    pub a: i64,
    pub q: u64,
    pub v: u64,
    pub d: u64,
    pub branch: ApproxBranch,
    /// The constructed fraction failed the check and was replaced by search.
    pub fallback: bool,
}

impl RationalApprox {
    pub fn ratio(&self) -> f64 {
        self.q as f64 / (self.d as f64).sqrt()
    }

    pub fn is_valid(&self) -> bool {
        well_approximates(self.v, self.d, self.a, self.q) && gcd_u64(self.a.unsigned_abs(), self.q) == 1
    }
}

/// `|v/d - a/q| <= 1/q^2`, i.e. `|v q - a d| * q <= d`, exactly.
pub fn well_approximates(v: u64, d: u64, a: i64, q: u64) -> bool {
    if q == 0 {
        return false;
    }
    let diff = (v as i128 * q as i128 - a as i128 * d as i128).unsigned_abs();
    diff * q as u128 <= d as u128
}

fn reduced(a: i128, q: i128) -> (i64, u64) {
    let (a, q) = if q < 0 { (-a, -q) } else { (a, q) };
    let g = gcd_u64(a.unsigned_abs() as u64, q as u64).max(1) as i128;
    ((a / g) as i64, (q / g) as u64)
}

/// Fraction `t/b` with `t = (b x - a0) / m`, from `b x = a0 (mod m)`.
fn from_relation(x: u64, m: u64, b: i128, a0: i128) -> (i64, u64) {
    let num = b * x as i128 - a0;
    debug_assert_eq!(num.rem_euclid(m as i128), 0);
    reduced(num / m as i128, b)
}

/// `|s| >= gamma |r|` with `gamma = 1/(2 sqrt N)`, i.e. `4 N s^2 >= r^2`.
fn prefers_s(n: i128, r: i128, s: i128) -> bool {
    4 * n * s * s >= r * r
}

/// Approximation to `v/m` from a witness `s v = r (mod m)`.
fn direct(n: i128, v: u64, m: u64, w: &RootWitness) -> (i64, u64, ApproxBranch) {
    let (r, s) = (w.r as i128, w.s as i128);
    if s != 0 && prefers_s(n, r, s) {
        let (a, q) = from_relation(v, m, s, r);
        (a, q, ApproxBranch::SDenominator)
    } else {
        // r v = -N s (mod m)
        let (a, q) = from_relation(v, m, r, -n * s);
        (a, q, ApproxBranch::RDenominator)
    }
}

/// Approximation to `x/m` where `x` is the inverse of a root `v1` with witness
/// `s v1 = r`; then `r x = s` and `N s x = -r (mod m)`.
fn inverted(n: i128, x: u64, m: u64, w: &RootWitness) -> (i64, u64) {
    let (r, s) = (w.r as i128, w.s as i128);
    // same test as `prefers_s` with the roles swapped: |r| >= gamma * N |s|
    if s == 0 || 4 * r * r >= n * s * s {
        from_relation(x, m, r, s)
    } else {
        from_relation(x, m, n * s, -r)
    }
}

/// Largest `q <= ceil(2 sqrt d)` with a valid reduced `a/q`.
pub fn search_largest(v: u64, d: u64) -> Option<(i64, u64)> {
    let top = isqrt(4 * d as u128) as u64 + 1;
    for q in (1..=top).rev() {
        // nearest numerator, then its neighbours
        let base = ((v as u128 * q as u128 + d as u128 / 2) / d as u128) as i64;
        for a in [base, base - 1, base + 1] {
            if gcd_u64(a.unsigned_abs(), q) == 1 && well_approximates(v, d, a, q) {
                return Some((a, q));
            }
        }
    }
    None
}

struct Layout {
    two_power: u32,
    odd: u64,
    n_divides: bool,
    core: u64,
}

fn layout(param: &FormParameter, d: u64) -> Layout {
    let n = param.n_u64();
    let two_power = if n % 2 == 1 { d.trailing_zeros() } else { 0 };
    let odd = d >> two_power;
    let n_divides = n > 1 && odd.is_multiple_of(n);
    let core = if n_divides { odd / n } else { odd };
    Layout { two_power, odd, n_divides, core }
}

fn witness_map(param: &FormParameter, core: u64) -> Result<HashMap<u64, RootWitness>> {
    let reps = representations_of(param, &factor(core as u128)?)?;
    Ok(witnesses(reps.represented, &reps.reps).into_iter().map(|w| (w.v, w)).collect())
}

fn construct(
    param: &FormParameter,
    lay: &Layout,
    map: &HashMap<u64, RootWitness>,
    d: u64,
    v: u64,
) -> Result<(i64, u64, ApproxBranch)> {
    let n = param.n() as i128;
    let vp = v % lay.odd;
    let (mut a, mut q, mut branch) = if lay.n_divides {
        let x = vp / param.n_u64();
        let v1 = mod_inverse(x as u128, lay.core as u128).unwrap_or(0) as u64;
        let w = map
            .get(&v1)
            .ok_or_else(|| crate::Error::Domain(format!("no witness for root {v1} mod {}", lay.core)))?;
        let (a, q) = inverted(n, x, lay.core, w);
        (a, q, ApproxBranch::NDividesD)
    } else {
        let w = map
            .get(&vp)
            .ok_or_else(|| crate::Error::Domain(format!("no witness for root {vp} mod {}", lay.core)))?;
        direct(n, vp, lay.core, w)
    };
    if lay.two_power > 0 {
        let j = ((v - vp) / lay.odd) as i128;
        let (na, nq) = reduced(a as i128 + j * q as i128, (q as i128) << lay.two_power);
        a = na;
        q = nq;
        branch = ApproxBranch::EvenD;
    }
    debug_assert!(d > 0);
    Ok((a, q, branch))
}

fn finish(v: u64, d: u64, (a, q, branch): (i64, u64, ApproxBranch)) -> RationalApprox {
    if well_approximates(v, d, a, q) {
        return RationalApprox { a, q, v, d, branch, fallback: false };
    }
    let (a, q) = search_largest(v, d).expect("q = 1 always qualifies");
    RationalApprox { a, q, v, d, branch, fallback: true }
}

fn check_param(param: &FormParameter) -> Result<()> {
    if ![1, 2, 67, 163].contains(&param.n()) {
        return domain(format!("approximations are defined for N in {{1, 2, 67, 163}}, not {}", param.n()));
    }
    Ok(())
}

/// The approximation attached to the root `v` of `v^2 + N = 0 (mod d)`.
pub fn approximate(param: &FormParameter, d: u64, v: u64) -> Result<RationalApprox> {
    check_param(param)?;
    if d == 0 || v >= d || !(v as u128 * v as u128 + param.n() as u128).is_multiple_of(d as u128) {
        return domain(format!("{v} is not a root of v^2 + {} mod {d}", param.n()));
    }
    let lay = layout(param, d);
    let map = witness_map(param, lay.core)?;
    Ok(finish(v, d, construct(param, &lay, &map, d, v)?))
}

/// Approximations for every root of `d`, in increasing order of `v`.
pub fn approximate_all(param: &FormParameter, d: u64) -> Result<Vec<RationalApprox>> {
    check_param(param)?;
    let f = factor(d as u128)?;
    let roots = roots_by_lifting(param, &f);
    if roots.is_empty() {
        return Ok(Vec::new());
    }
    let lay = layout(param, d);
    let map = witness_map(param, lay.core)?;
    roots
        .roots
        .iter()
        .map(|&v| Ok(finish(v, d, construct(param, &lay, &map, d, v)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DenominatorStats {
    pub n: u32,
    pub d_max: u64,
    pub count: u64,
    pub c1_empirical: f64,
    pub c2_empirical: f64,
    pub argmin: Option<(u64, u64)>,
    pub argmax: Option<(u64, u64)>,
    pub fallbacks: u64,
    /// Results failing the inequality even after the search (always 0 unless a bug).
    pub invalid: u64,
}

/// All approximations for `d <= d_max`, ordered by `(d, v)`.
pub fn approximation_table(param: &FormParameter, d_max: u64) -> Result<Vec<RationalApprox>> {
    let per_d: Vec<Result<Vec<RationalApprox>>> =
        (1..=d_max).into_par_iter().map(|d| approximate_all(param, d)).collect();
    let mut out = Vec::new();
    for r in per_d {
        out.extend(r?);
    }
    Ok(out)
}

/// Extremes of `q / sqrt(d)` over all roots of all `d <= d_max`.
pub fn denominator_statistics(param: &FormParameter, d_max: u64) -> Result<DenominatorStats> {
    let table = approximation_table(param, d_max)?;
    Ok(summarize(param.n(), d_max, &table))
}

pub fn summarize(n: u32, d_max: u64, table: &[RationalApprox]) -> DenominatorStats {
    let mut st = DenominatorStats {
        n,
        d_max,
        count: 0,
        c1_empirical: f64::INFINITY,
        c2_empirical: 0.0,
        argmin: None,
        argmax: None,
        fallbacks: 0,
        invalid: 0,
    };
    for ap in table {
        st.count += 1;
        let ratio = ap.ratio();
        if ratio < st.c1_empirical {
            st.c1_empirical = ratio;
            st.argmin = Some((ap.d, ap.v));
        }
        if ratio > st.c2_empirical {
            st.c2_empirical = ratio;
            st.argmax = Some((ap.d, ap.v));
        }
        st.fallbacks += ap.fallback as u64;
        st.invalid += !ap.is_valid() as u64;
    }
    st
}

/// Check the two congruences behind the construction,
/// `v/d = -c r~/s + r/(d s)` and `v/d = c s~/r - N s/(d r)` (mod 1),
/// where `r r~ = 1 (mod s)`, `s s~ = 1 (mod r)` and `r^2 + N s^2 = c d`.
/// Returns `(first holds, second holds)`.
pub fn proof_identities(n: u64, d: u64, v: u64, r: i64, s: i64, c: u64) -> (bool, bool) {
    let (d_i, v_i, r_i, s_i, c_i, n_i) = (d as i128, v as i128, r as i128, s as i128, c as i128, n as i128);
    let inv = |x: i128, m: i128| -> i128 {
        if m.abs() == 1 {
            0
        } else {
            mod_inverse(x.rem_euclid(m.abs()) as u128, m.unsigned_abs()).map_or(-1, |y| y as i128)
        }
    };
    let r_t = inv(r_i, s_i);
    let s_t = inv(s_i, r_i);
    let first = s_i != 0 && r_t >= 0 && (v_i * s_i + c_i * r_t * d_i - r_i).rem_euclid(d_i * s_i.abs()) == 0;
    let second = r_i != 0 && s_t >= 0 && (v_i * r_i - c_i * s_t * d_i + n_i * s_i).rem_euclid(d_i * r_i.abs()) == 0;
    (first, second)
}
