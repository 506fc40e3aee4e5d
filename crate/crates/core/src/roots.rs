//! Solutions of `v^2 + N = 0 (mod d)`.
//!
//! Two independent routes are implemented. [`roots_by_lifting`] works prime
//! power by prime power (square roots mod `p`, Hensel lifting, 2-adic
//! enumeration) and glues with CRT. [`roots_from_representations`] builds
//! every primitive norm representation `r^2 + N s^2 = d` (or `4d`) from
//! prime-power generators in the ring of integers and maps each one to
//! `v = +-r/s (mod d)`. [`verify_bijection`] compares the two.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::modular::{crt_pair, gcd_u64, is_square, isqrt, mod_inverse, reduce};
use crate::arith::{factor, hensel_lift, sqrt_mod, FactoredInteger, SpfSieve};
use crate::error::{domain, Result};
use crate::FormParameter;

/// Largest modulus handled by the root routines.
pub const MAX_MODULUS: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootSet {
    pub d: u64,
    /// Strictly increasing, in `[0, d)`.
    pub roots: Vec<u64>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn contains(&self, v: u64) -> bool {
        self.roots.binary_search(&v).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum RepKind {
    /// `d = r^2 + N s^2`.
    Integral,
    /// `4d = r^2 + N s^2`, `r = s (mod 2)`.
    HalfIntegral,
    /// `8d = r^2 + N s^2` with `r, s` odd: the representation of `2d`
    /// used when `N = 7` and `8 | d`.
    Doubled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NormRepresentation {
    pub r: i64,
    pub s: i64,
    pub kind: RepKind,
}

impl NormRepresentation {
    /// The multiplier `c` in `r^2 + N s^2 = c * d`.
    pub fn scale(&self) -> u64 {
        match self.kind {
            RepKind::Integral => 1,
            RepKind::HalfIntegral => 4,
            RepKind::Doubled => 8,
        }
    }
}

/// Which case of the correspondence applies to a modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "case")]
pub enum Branch {
    /// `gcd(d, 2N) = 1` (including `d = 1`).
    Coprime,
    /// `N = 7`, `gcd(d, 7) = 1`, `2^k || d` with `k >= 3`.
    SevenEven { two_power: u32 },
    /// `d = N * d1` with `N` not dividing `d1` and `d1` in one of the cases above.
    NDivides { cofactor: u64 },
    /// A case in which the congruence has no solution at all.
    Unsolvable,
    /// Not covered by the correspondence (e.g. `N = 3`, or `2 || d` for odd `N`).
    Outside,
}

/// Classify `d` for the correspondence.
pub fn lemma_branch(param: &FormParameter, d: &FactoredInteger) -> Branch {
    let n = param.n() as u128;
    let two_power = d.factors.first().filter(|f| f.0 == 2).map_or(0, |f| f.1);
    let n_power = if n > 1 {
        d.factors.iter().find(|f| f.0 == n).map_or(0, |f| f.1)
    } else {
        0
    };
    if n > 1 && n_power >= 2 {
        return Branch::Unsolvable;
    }
    if n != 2 && n != 7 && two_power >= 3 {
        return Branch::Unsolvable;
    }
    if n == 1 && two_power >= 2 {
        return Branch::Unsolvable;
    }
    if param.n() == 3 {
        return Branch::Outside;
    }
    let inner = |two_power: u32| -> Branch {
        if two_power == 0 {
            Branch::Coprime
        } else if n == 7 && two_power >= 3 {
            Branch::SevenEven { two_power }
        } else {
            Branch::Outside
        }
    };
    if n_power == 1 {
        // for N = 2 the factor 2 is N itself
        let tp = if n == 2 { 0 } else { two_power };
        return match inner(tp) {
            Branch::Outside => Branch::Outside,
            _ => Branch::NDivides { cofactor: (d.value / n) as u64 },
        };
    }
    inner(two_power)
}

/// Roots of `v^2 + N = 0 (mod p^e)`, sorted.
pub fn prime_power_roots(param: &FormParameter, p: u64, e: u32) -> Vec<u64> {
    let n = param.n_u64();
    if e == 0 {
        return vec![0];
    }
    let pe = p.pow(e);
    if p == 2 {
        // roots mod 2, then extend one bit at a time
        let mut cur: Vec<u64> = (0..2u64).filter(|v| (v * v + n).is_multiple_of(2)).collect();
        let mut m = 2u64;
        for _ in 1..e {
            let next_m = m * 2;
            let mut nxt = Vec::new();
            for &u in &cur {
                for c in [u, u + m] {
                    if (c as u128 * c as u128 + n as u128).is_multiple_of(next_m as u128) {
                        nxt.push(c);
                    }
                }
            }
            cur = nxt;
            m = next_m;
        }
        cur.sort_unstable();
        return cur;
    }
    if n.is_multiple_of(p) {
        // N is squarefree, so only v = 0 (mod p) at exponent 1
        return if e == 1 { vec![0] } else { Vec::new() };
    }
    let Some((w, _)) = sqrt_mod(-(n as i128), p as u128).expect("p is prime") else {
        return Vec::new();
    };
    let lifted = hensel_lift(w as i128, -(n as i128), p as u128, e).expect("p does not divide 2w") as u64;
    let mut out = vec![lifted, pe - lifted];
    out.sort_unstable();
    out
}

/// All roots by per-prime-power lifting and CRT.
pub fn roots_by_lifting(param: &FormParameter, d: &FactoredInteger) -> RootSet {
    let dv = d.value as u64;
    let mut acc: Vec<u64> = vec![0];
    let mut m = 1u64;
    for &(p, e) in &d.factors {
        let p = p as u64;
        let pr = prime_power_roots(param, p, e);
        if pr.is_empty() {
            return RootSet { d: dv, roots: Vec::new() };
        }
        let pe = p.pow(e);
        acc = combine(&acc, m, &pr, pe);
        m *= pe;
    }
    acc.sort_unstable();
    RootSet { d: dv, roots: acc }
}

fn combine(a: &[u64], ma: u64, b: &[u64], mb: u64) -> Vec<u64> {
    let inv = mod_inverse(ma as u128 % mb as u128, mb as u128).expect("coprime") as u64;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(crt_pair(x, ma, y, mb, inv));
        }
    }
    out
}

/// Element `(r + s sqrt(-N)) / h` of the ring of integers, `h in {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Elt {
    r: i128,
    s: i128,
}

#[derive(Clone, Copy)]
struct Ring {
    n: i128,
    h: i128,
}

impl Ring {
    fn of(param: &FormParameter) -> Self {
        Ring { n: param.n() as i128, h: if param.half_integral() { 2 } else { 1 } }
    }

    fn one(&self) -> Elt {
        Elt { r: self.h, s: 0 }
    }

    fn mul(&self, a: Elt, b: Elt) -> Elt {
        let r = a.r * b.r - self.n * a.s * b.s;
        let s = a.r * b.s + a.s * b.r;
        debug_assert!(r % self.h == 0 && s % self.h == 0);
        Elt { r: r / self.h, s: s / self.h }
    }

    fn pow(&self, a: Elt, e: u32) -> Elt {
        (0..e).fold(self.one(), |acc, _| self.mul(acc, a))
    }

    fn conj(a: Elt) -> Elt {
        Elt { r: a.r, s: -a.s }
    }

    /// `r^2 + N s^2 = h^2 * norm`.
    fn scaled_norm(&self, a: Elt) -> i128 {
        a.r * a.r + self.n * a.s * a.s
    }

    /// Representative with `r > 0`, `s >= 0` of `a` up to units and conjugation.
    /// For `N = 1` the associate with `r` odd is chosen.
    fn canonical(&self, a: Elt) -> Elt {
        let mut a = a;
        if self.n == 1 {
            let assoc = [a, Elt { r: -a.s, s: a.r }, Elt { r: -a.r, s: -a.s }, Elt { r: a.s, s: -a.r }];
            a = *assoc
                .iter()
                .find(|e| e.r > 0 && e.r % 2 != 0)
                .or_else(|| assoc.iter().find(|e| e.r > 0))
                .unwrap_or(&a);
        } else if a.r < 0 || (a.r == 0 && a.s < 0) {
            a = Elt { r: -a.r, s: -a.s };
        }
        Elt { r: a.r, s: a.s.abs() }
    }
}

/// Primitive element of norm `p^e` (`p` split), via Cornacchia on a lifted root.
fn prime_power_generator(param: &FormParameter, ring: Ring, p: u64, e: u32) -> Result<Elt> {
    let m = (p as u128).pow(e);
    let roots = prime_power_roots(param, p, e);
    let Some(&t) = roots.first() else {
        return domain(format!("{p} does not split"));
    };
    let n = ring.n as u128;
    let (r, target) = if ring.h == 1 {
        let (mut a, mut b) = (m, t as u128);
        while b * b > m {
            (a, b) = (b, a % b);
        }
        (b, m)
    } else {
        let t = if t % 2 == 1 { t as u128 } else { m - t as u128 };
        let bound = isqrt(4 * m);
        let (mut a, mut b) = (2 * m, t);
        while b > bound {
            (a, b) = (b, a % b);
        }
        (b, 4 * m)
    };
    let rest = target - r * r;
    if rest % n == 0 {
        if let Some(s) = is_square(rest / n) {
            let g = Elt { r: r as i128, s: s as i128 };
            debug_assert_eq!(ring.scaled_norm(g), (ring.h * ring.h) * m as i128);
            return Ok(g);
        }
    }
    domain(format!("Cornacchia failed for N={} at {p}^{e}", param.n()))
}

fn odd_part_elements(param: &FormParameter, ring: Ring, d: &FactoredInteger) -> Result<Vec<Elt>> {
    let mut elems = vec![ring.one()];
    for &(p, e) in &d.factors {
        if p == 2 {
            continue;
        }
        if param.chi(p as i128) != 1 {
            return Ok(Vec::new());
        }
        let g = prime_power_generator(param, ring, p as u64, e)?;
        let mut next = Vec::with_capacity(elems.len() * 2);
        for &x in &elems {
            next.push(ring.mul(x, g));
            next.push(ring.mul(x, Ring::conj(g)));
        }
        elems = next;
    }
    Ok(elems)
}

fn canonical_set(ring: Ring, elems: &[Elt], kind: RepKind) -> Vec<NormRepresentation> {
    let set: BTreeSet<(i64, i64)> = elems
        .iter()
        .map(|&e| {
            let c = ring.canonical(e);
            (c.r as i64, c.s as i64)
        })
        .collect();
    set.into_iter().map(|(r, s)| NormRepresentation { r, s, kind }).collect()
}

/// The representations attached to `d`, together with the modulus they
/// represent (`d` itself, or the cofactor `d / N` in the `N | d` case).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Representations {
    pub branch: Branch,
    pub represented: u64,
    pub reps: Vec<NormRepresentation>,
}

/// All primitive norm representations of `d`, canonicalised with `r > 0`, `s >= 0`.
pub fn representations_of(param: &FormParameter, d: &FactoredInteger) -> Result<Representations> {
    if d.value > MAX_MODULUS as u128 {
        return Err(crate::Error::Limit { what: "modulus", value: d.value, limit: MAX_MODULUS as u128 });
    }
    let branch = lemma_branch(param, d);
    let ring = Ring::of(param);
    let reps = match branch {
        Branch::Coprime => {
            let kind = if ring.h == 1 { RepKind::Integral } else { RepKind::HalfIntegral };
            canonical_set(ring, &odd_part_elements(param, ring, d)?, kind)
        }
        Branch::SevenEven { two_power } => seven_even_reps(param, ring, d, two_power)?,
        Branch::NDivides { cofactor } => {
            let inner = representations_of(param, &factor(cofactor as u128)?)?;
            return Ok(Representations { branch, represented: cofactor, reps: inner.reps });
        }
        Branch::Unsolvable | Branch::Outside => Vec::new(),
    };
    Ok(Representations { branch, represented: d.value as u64, reps })
}

fn seven_even_reps(
    param: &FormParameter,
    ring: Ring,
    d: &FactoredInteger,
    k: u32,
) -> Result<Vec<NormRepresentation>> {
    let odd = odd_part_elements(param, ring, d)?;
    if odd.is_empty() {
        return Ok(Vec::new());
    }
    let pi = Elt { r: 1, s: 1 };
    let two = Elt { r: 4, s: 0 };
    let mut of_d = Vec::new();
    let mut of_2d = Vec::new();
    for base in [pi, Ring::conj(pi)] {
        let a = ring.mul(two, ring.pow(base, k - 2));
        let b = ring.pow(base, k + 1);
        for &o in &odd {
            of_d.push(ring.mul(a, o));
            of_2d.push(ring.mul(b, o));
        }
    }
    let mut reps = canonical_set(ring, &of_d, RepKind::HalfIntegral);
    reps.extend(canonical_set(ring, &of_2d, RepKind::Doubled));
    Ok(reps)
}

/// A root together with the integers `(r, s)` it came from:
/// `s * v = r (mod modulus)` and `r^2 + N s^2 = scale * modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootWitness {
    pub v: u64,
    pub r: i64,
    pub s: i64,
    pub scale: u64,
}

/// Roots of the represented modulus from a list of representations, with
/// `(r, s)` halved when both are even. The sign of `s` is carried so that
/// each witness satisfies `s * v = r`.
pub fn witnesses(modulus: u64, reps: &[NormRepresentation]) -> Vec<RootWitness> {
    let mut out = Vec::with_capacity(reps.len() * 2);
    for rep in reps {
        let (mut r, mut s, mut scale) = (rep.r, rep.s, rep.scale());
        if rep.kind == RepKind::HalfIntegral && r % 2 == 0 && s % 2 == 0 {
            r /= 2;
            s /= 2;
            scale = 1;
        }
        if modulus == 1 {
            out.push(RootWitness { v: 0, r, s, scale });
            continue;
        }
        let Some(s_inv) = mod_inverse(reduce(s as i128, modulus as u128), modulus as u128) else {
            continue;
        };
        let v = crate::arith::modular::mul_mod(reduce(r as i128, modulus as u128), s_inv, modulus as u128) as u64;
        out.push(RootWitness { v, r, s, scale });
        if s != 0 {
            let w = (modulus - v) % modulus;
            out.push(RootWitness { v: w, r, s: -s, scale });
        }
    }
    out
}

/// Roots in the order produced by the representation map, duplicates kept.
fn roots_from_reps_multiset(param: &FormParameter, d: &FactoredInteger) -> Result<Vec<u64>> {
    let reps = representations_of(param, d)?;
    let base: Vec<u64> = witnesses(reps.represented, &reps.reps).iter().map(|w| w.v).collect();
    Ok(match reps.branch {
        Branch::NDivides { cofactor } => {
            let n = param.n_u64();
            base.iter()
                .map(|&v1| {
                    let w = mod_inverse(v1 as u128, cofactor as u128).expect("root is a unit") as u64;
                    n * w
                })
                .collect()
        }
        _ => base,
    })
}

/// Roots via the representation correspondence. Empty outside the
/// covered cases.
pub fn roots_from_representations(param: &FormParameter, d: &FactoredInteger) -> Result<RootSet> {
    let mut roots = roots_from_reps_multiset(param, d)?;
    roots.sort_unstable();
    roots.dedup();
    Ok(RootSet { d: d.value as u64, roots })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BijectionMismatch {
    pub d: u64,
    pub lifted: Vec<u64>,
    pub from_representations: Vec<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BijectionReport {
    pub n: u32,
    pub d_max: u64,
    pub coprime_checked: u64,
    pub seven_even_checked: u64,
    pub n_divides_checked: u64,
    pub unsolvable_checked: u64,
    pub skipped: u64,
    pub mismatches: u64,
    pub first_counterexample: Option<BijectionMismatch>,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

enum Outcome {
    Ok(Branch),
    Skipped,
    Mismatch(BijectionMismatch),
}

fn check_one(param: &FormParameter, d: u64) -> Result<Outcome> {
    let f = factor(d as u128)?;
    let branch = lemma_branch(param, &f);
    let lifted = roots_by_lifting(param, &f);
    let from = match branch {
        Branch::Outside => return Ok(Outcome::Skipped),
        Branch::Unsolvable => Vec::new(),
        _ => roots_from_reps_multiset(param, &f)?,
    };
    let mut sorted = from.clone();
    sorted.sort_unstable();
    let distinct = sorted.windows(2).all(|w| w[0] != w[1]);
    if distinct && sorted == lifted.roots {
        Ok(Outcome::Ok(branch))
    } else {
        Ok(Outcome::Mismatch(BijectionMismatch { d, lifted: lifted.roots, from_representations: from }))
    }
}

/// Compare both root algorithms for every `d <= d_max` in a covered case.
/// A mismatch means the sets differ or two representations gave the same root.
pub fn verify_bijection(param: &FormParameter, d_max: u64) -> Result<BijectionReport> {
    if d_max == 0 {
        return domain("verify_bijection: d_max must be positive");
    }
    let outcomes: Vec<Result<Outcome>> =
        (1..=d_max).into_par_iter().map(|d| check_one(param, d)).collect();
    let mut rep = BijectionReport { n: param.n(), d_max, ..Default::default() };
    for o in outcomes {
        match o? {
            Outcome::Ok(Branch::Coprime) => rep.coprime_checked += 1,
            Outcome::Ok(Branch::SevenEven { .. }) => rep.seven_even_checked += 1,
            Outcome::Ok(Branch::NDivides { .. }) => rep.n_divides_checked += 1,
            Outcome::Ok(_) => rep.unsolvable_checked += 1,
            Outcome::Skipped => rep.skipped += 1,
            Outcome::Mismatch(m) => {
                rep.mismatches += 1;
                if rep.first_counterexample.is_none() {
                    rep.first_counterexample = Some(m);
                }
            }
        }
    }
    Ok(rep)
}

/// Roots of every modulus `d <= limit`, built multiplicatively from a
/// smallest-prime-factor sieve.
pub struct RootTable {
    limit: usize,
    offsets: Vec<u32>,
    roots: Vec<u32>,
}

impl RootTable {
    pub fn build(param: &FormParameter, limit: usize) -> Self {
        assert!(limit < u32::MAX as usize / 2, "root table limit too large");
        let sieve = SpfSieve::new(limit.max(1));
        let mut offsets = Vec::with_capacity(limit + 2);
        let mut roots: Vec<u32> = Vec::new();
        let mut memo: HashMap<(u64, u32), Vec<u64>> = HashMap::new();
        offsets.push(0); // index 0 unused
        offsets.push(0);
        if limit >= 1 {
            roots.push(0);
            offsets.push(1);
        }
        for d in 2..=limit {
            let (p, e, rest) = sieve.split_smallest(d);
            let pr = memo.entry((p, e)).or_insert_with(|| prime_power_roots(param, p, e));
            let pe = p.pow(e);
            let start = roots.len();
            if !pr.is_empty() {
                let (lo, hi) = (offsets[rest] as usize, offsets[rest + 1] as usize);
                if lo < hi {
                    let inv = mod_inverse(rest as u128 % pe as u128, pe as u128).unwrap() as u64;
                    for i in lo..hi {
                        let x = roots[i] as u64;
                        for &y in pr.iter() {
                            roots.push(crt_pair(x, rest as u64, y, pe, inv) as u32);
                        }
                    }
                    roots[start..].sort_unstable();
                }
            }
            offsets.push(roots.len() as u32);
        }
        RootTable { limit, offsets, roots }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn roots(&self, d: usize) -> &[u32] {
        &self.roots[self.offsets[d] as usize..self.offsets[d + 1] as usize]
    }

    pub fn count(&self, d: usize) -> usize {
        (self.offsets[d + 1] - self.offsets[d]) as usize
    }
}

/// Convenience: roots of `d` by lifting, factoring `d` first.
pub fn roots_of(param: &FormParameter, d: u64) -> Result<RootSet> {
    if d == 0 {
        return domain("modulus must be positive");
    }
    Ok(roots_by_lifting(param, &factor(d as u128)?))
}

/// `gcd` helper re-exported for callers that work with `u64` moduli.
pub fn coprime(a: u64, b: u64) -> bool {
    gcd_u64(a, b) == 1
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

    fn brute(param: &FormParameter, d: u64) -> Vec<u64> {
        let n = param.n_u64() as u128;
        (0..d).filter(|&v| (v as u128 * v as u128 + n).is_multiple_of(d as u128)).collect()
    }

    #[test]
    fn lifting_examples() {
        assert_eq!(roots_by_lifting(&p(2), &f(9)).roots, vec![4, 5]);
        assert!(roots_by_lifting(&p(2), &f(5)).roots.is_empty());
        assert_eq!(roots_by_lifting(&p(2), &f(1)).roots, vec![0]);
    }

    #[test]
    fn lifting_matches_brute_force() {
        for &n in &crate::form::CLASS_NUMBER_ONE {
            let param = p(n);
            for d in 1..=1500 {
                assert_eq!(roots_by_lifting(&param, &f(d)).roots, brute(&param, d), "N={n} d={d}");
            }
        }
    }

    #[test]
    fn seven_two_adic_counts() {
        let param = p(7);
        let counts: Vec<usize> = (1..=8).map(|k| roots_by_lifting(&param, &f(1 << k)).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 4, 4, 4, 4, 4]);
    }

    #[test]
    fn representation_examples() {
        let r = representations_of(&p(2), &f(9)).unwrap();
        assert_eq!(r.reps, vec![NormRepresentation { r: 1, s: 2, kind: RepKind::Integral }]);
        let r = representations_of(&p(2), &f(17)).unwrap();
        assert_eq!(r.reps, vec![NormRepresentation { r: 3, s: 2, kind: RepKind::Integral }]);
        // 4 * 71 = 4^2 + 67 * 2^2; there is no representation with s = 2, r = 3
        let r = representations_of(&p(67), &f(71)).unwrap();
        assert_eq!(r.reps, vec![NormRepresentation { r: 4, s: 2, kind: RepKind::HalfIntegral }]);
    }

    #[test]
    fn representation_examples_match_search() {
        for &n in &[2u32, 7, 11, 19, 43, 67, 163] {
            let param = p(n);
            for d in (1..800u64).filter(|d| coprime(*d, 2 * n as u64)) {
                let got = representations_of(&param, &f(d)).unwrap().reps;
                let c: i64 = if param.half_integral() { 4 } else { 1 };
                let target = c * d as i64;
                let mut want = Vec::new();
                let mut s = 0i64;
                while n as i64 * s * s <= target {
                    let rest = target - n as i64 * s * s;
                    if let Some(r) = is_square(rest as u128) {
                        let r = r as i64;
                        let g = num_gcd(r, s);
                        let parity_ok = c == 1 || (r - s) % 2 == 0;
                        if r > 0 && parity_ok && g <= c.min(2) {
                            want.push(NormRepresentation { r, s, kind: got.first().map_or(RepKind::Integral, |x| x.kind) });
                        }
                    }
                    s += 1;
                }
                want.sort();
                assert_eq!(got, want, "N={n} d={d}");
            }
        }
    }

    fn num_gcd(a: i64, b: i64) -> i64 {
        gcd_u64(a.unsigned_abs(), b.unsigned_abs()) as i64
    }

    #[test]
    fn roots_from_representation_examples() {
        assert_eq!(roots_from_representations(&p(2), &f(9)).unwrap().roots, vec![4, 5]);
        assert_eq!(roots_from_representations(&p(2), &f(17)).unwrap().roots, vec![7, 10]);
        assert_eq!(roots_from_representations(&p(2), &f(3)).unwrap().roots, vec![1, 2]);
        assert_eq!(roots_from_representations(&p(163), &f(1)).unwrap().roots, vec![0]);
    }

    #[test]
    fn bijection_small() {
        for (n, dmax) in [(2u32, 500u64), (163, 500), (7, 512), (1, 500), (11, 300), (67, 500)] {
            let rep = verify_bijection(&p(n), dmax).unwrap();
            assert!(rep.passed(), "N={n}: {:?}", rep.first_counterexample);
            assert!(rep.coprime_checked > 0);
        }
        let rep = verify_bijection(&p(7), 512).unwrap();
        assert!(rep.seven_even_checked > 0);
    }

    #[test]
    fn witnesses_satisfy_congruence() {
        for &n in &[1u32, 2, 7, 67, 163] {
            let param = p(n);
            for d in 1..400u64 {
                let reps = representations_of(&param, &f(d)).unwrap();
                let m = reps.represented;
                for w in witnesses(m, &reps.reps) {
                    assert_eq!(reduce(w.s as i128 * w.v as i128 - w.r as i128, m as u128), 0);
                    let lhs = w.r as i128 * w.r as i128 + n as i128 * w.s as i128 * w.s as i128;
                    assert_eq!(lhs, w.scale as i128 * m as i128);
                }
            }
        }
    }

    #[test]
    fn three_is_excluded() {
        let param = p(3);
        assert_eq!(lemma_branch(&param, &f(7)), Branch::Outside);
        assert!(representations_of(&param, &f(7)).unwrap().reps.is_empty());
        assert_eq!(roots_by_lifting(&param, &f(7)).len(), 2);
    }

    #[test]
    fn table_matches_lifting() {
        for &n in &[2u32, 7, 67, 163] {
            let param = p(n);
            let t = RootTable::build(&param, 3000);
            for d in 1..=3000usize {
                let want = roots_by_lifting(&param, &f(d as u64)).roots;
                let got: Vec<u64> = t.roots(d).iter().map(|&x| x as u64).collect();
                assert_eq!(got, want, "N={n} d={d}");
            }
        }
    }

    #[test]
    fn generators_for_prime_powers() {
        let param = p(163);
        let ring = Ring::of(&param);
        for &(q, e) in &[(41u64, 1u32), (41, 3), (47, 2), (167, 2)] {
            if param.chi(q as i128) == 1 {
                let g = prime_power_generator(&param, ring, q, e).unwrap();
                assert_eq!(ring.scaled_norm(g), 4 * (q as i128).pow(e));
            }
        }
    }
}
