//! `L(s, chi_N)`, the local factors of `G_N(s)` and `G_N(s)` itself.

use std::f64::consts::PI;

use crate::arith::primes_up_to;
use crate::error::{domain, Result};
use crate::rho::{is_bad_prime, rho_prime_power};

/// Largest prime power enumerated for a local series.
const LOCAL_SERIES_MODULUS: u64 = 1 << 23;
use crate::FormParameter;

use super::special::{digamma, hurwitz_zeta};
use super::Estimate;

/// `L(s, chi_N)` for `s in {1, 2}` from the periodic decomposition
/// `q^-s sum_a chi(a) zeta(s, a/q)`; at `s = 1` the digamma form
/// `-(1/q) sum_a chi(a) psi(a/q)` is used.
pub fn l_value(param: &FormParameter, s: u32) -> Result<f64> {
    let q = param.conductor();
    let qf = q as f64;
    let terms = (1..q).filter_map(|a| {
        let c = param.chi(a as i128);
        (c != 0).then_some((c as f64, a as f64 / qf))
    });
    match s {
        1 => Ok(-terms.map(|(c, x)| c * digamma(x)).sum::<f64>() / qf),
        2 => Ok(terms.map(|(c, x)| c * hurwitz_zeta(2.0, x)).sum::<f64>() / (qf * qf)),
        _ => domain(format!("L-values are provided for s in {{1, 2}}, not {s}")),
    }
}

/// `2 pi h / (w sqrt|D|)` with `h = 1`.
pub fn class_number_formula(param: &FormParameter) -> f64 {
    2.0 * PI / (param.units_count() as f64 * (param.conductor() as f64).sqrt())
}

/// Fits `t_{k+2} = a t_{k+1} + b t_k` (or `t_{k+1} = a t_k`) on the tail of
/// `t` and returns `(start, a, b)` for the earliest start where the fit holds
/// with at least two checked equations.
fn tail_recurrence(t: &[f64]) -> Option<(usize, f64, f64)> {
    let n = t.len();
    for start in 0..n {
        if n >= start + 3 && t[start] != 0.0 {
            let a = t[start + 1] / t[start];
            if (start + 1..n - 1).all(|k| t[k + 1] == a * t[k]) {
                return Some((start, a, 0.0));
            }
        }
        if n >= start + 6 {
            let (t0, t1, t2, t3) = (t[start], t[start + 1], t[start + 2], t[start + 3]);
            let det = t1 * t1 - t0 * t2;
            if det != 0.0 {
                let a = (t2 * t1 - t3 * t0) / det;
                let b = (t3 * t1 - t2 * t2) / det;
                let (a, b) = (a.round(), b.round());
                if (start..n - 2).all(|k| t[k + 2] == a * t[k + 1] + b * t[k]) {
                    return Some((start, a, b));
                }
            }
        }
    }
    None
}

/// `F_p(s) = sum_a rho_N(p^a) p^{-a(s+1)}` at a prime `p | 2N`. Terms are
/// enumerated while `p^a` stays within the direct-count limit; once they
/// satisfy a linear recurrence of order at most two the remaining series is
/// summed in closed form.
pub fn bad_local_series(param: &FormParameter, p: u64, s: f64) -> Result<f64> {
    if !is_bad_prime(param, p) {
        return domain(format!("{p} does not divide 2N"));
    }
    let mut t = Vec::new();
    let mut pa = 1u64;
    let mut a = 0u32;
    while pa <= LOCAL_SERIES_MODULUS {
        t.push(rho_prime_power(param, p, a)? as f64);
        a += 1;
        pa = match pa.checked_mul(p) {
            Some(v) => v,
            None => break,
        };
    }
    let (start, ra, rb) = tail_recurrence(&t)
        .ok_or_else(|| crate::Error::Domain(format!("local series at p = {p} did not stabilize")))?;
    let z = (p as f64).powf(-(s + 1.0));
    let head: f64 = t[..start].iter().enumerate().map(|(k, v)| v * z.powi(k as i32)).sum();
    let (u0, u1) = (t[start], t.get(start + 1).copied().unwrap_or(ra * t[start]));
    let tail = z.powi(start as i32) * (u0 + (u1 - ra * u0) * z) / (1.0 - ra * z - rb * z * z);
    Ok(head + tail)
}

/// `G_p(s) = F_p(s) (1 - p^-s)(1 - chi(p) p^-s)` at a prime `p | 2N`.
pub fn bad_local_factor(param: &FormParameter, p: u64, s: f64) -> Result<f64> {
    let chi = param.chi(p as i128) as f64;
    let x = (p as f64).powf(-s);
    Ok(bad_local_series(param, p, s)? * (1.0 - x) * (1.0 - chi * x))
}

/// `G_N(s) = prod_{p | 2N} G_p(s) prod_{p not | 2N} (1 - chi(p) p^{-s-1})`
/// truncated at `P`, with the halfwidth from `|log tail| <= P^-s / s`.
pub fn g_euler_truncated(param: &FormParameter, s: f64, cutoff: u64) -> Result<Estimate> {
    if s.is_nan() || s <= 0.0 {
        return domain("s must be positive");
    }
    let mut log = 0.0;
    for p in param.bad_primes() {
        log += bad_local_factor(param, p, s)?.ln();
    }
    let cutoff = u32::try_from(cutoff).map_err(|_| crate::Error::Domain("Euler product cutoff too large".into()))?;
    for p in primes_up_to(cutoff).into_iter().map(u64::from) {
        if is_bad_prime(param, p) {
            continue;
        }
        log += (-(param.chi(p as i128) as f64) * (p as f64).powf(-s - 1.0)).ln_1p();
    }
    let value = log.exp();
    let tail = (cutoff.max(1) as f64).powf(-s) / s;
    Ok(Estimate { value, halfwidth: value * tail.exp_m1() })
}

/// `G_N(s) = L(s+1, chi)^-1 prod_{p | 2N} G_p(s) / (1 - chi(p) p^{-s-1})`
/// for `s in {1}`, using the exact `L(2, chi)`.
pub fn g_closed(param: &FormParameter, s: u32) -> Result<f64> {
    if s != 1 {
        return domain("the closed form of G_N is provided at s = 1 only");
    }
    let mut value = 1.0 / l_value(param, s + 1)?;
    for p in param.bad_primes() {
        let chi = param.chi(p as i128) as f64;
        value *= bad_local_factor(param, p, s as f64)? / (1.0 - chi * (p as f64).powi(-(s as i32) - 1));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> FormParameter {
        FormParameter::new(n).unwrap()
    }

    #[test]
    fn l1_matches_class_number_formula() {
        for &n in &crate::form::CLASS_NUMBER_ONE {
            let param = p(n);
            let l1 = l_value(&param, 1).unwrap();
            assert!((l1 - class_number_formula(&param)).abs() < 1e-12, "N={n}");
        }
        assert!((l_value(&p(2), 1).unwrap() - PI / (2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((l_value(&p(163), 1).unwrap() - PI / 163f64.sqrt()).abs() < 1e-12);
        assert!(l_value(&p(2), 3).is_err());
    }

    #[test]
    fn l2_direct_series() {
        for n in [2u32, 7, 67] {
            let param = p(n);
            // alternating-period partial sums converge like 1/K
            let direct: f64 = (1..2_000_000i128).map(|k| param.chi(k) as f64 / (k * k) as f64).sum();
            assert!((l_value(&param, 2).unwrap() - direct).abs() < 1e-6, "N={n}");
        }
        let l2 = l_value(&p(2), 2).unwrap();
        assert!(l2 > 0.8 && l2 < 1.2);
    }

    #[test]
    fn euler_factor_examples() {
        let two = p(2);
        let base = g_euler_truncated(&two, 2.0, 2).unwrap().value;
        let with3 = g_euler_truncated(&two, 2.0, 3).unwrap().value;
        let with5 = g_euler_truncated(&two, 2.0, 5).unwrap().value;
        assert!((with3 / base - (1.0 - 1.0 / 27.0)).abs() < 1e-15);
        assert!((with5 / with3 - (1.0 + 1.0 / 125.0)).abs() < 1e-15);
        let a = g_euler_truncated(&two, 2.0, 1_000).unwrap();
        let b = g_euler_truncated(&two, 2.0, 100_000).unwrap();
        assert!((a.value - b.value).abs() < 1e-6);
        assert!((a.value - b.value).abs() <= a.halfwidth);
    }

    #[test]
    fn closed_form_agrees_with_product() {
        for n in [1u32, 2, 3, 7, 67, 163] {
            let param = p(n);
            let prod = g_euler_truncated(&param, 1.0, 1_000_000).unwrap();
            let closed = g_closed(&param, 1).unwrap();
            assert!((prod.value - closed).abs() <= prod.halfwidth, "N={n}: {} vs {closed}", prod.value);
        }
    }

    #[test]
    fn local_series_against_truncation() {
        for n in [1u32, 2, 3, 7, 67, 163] {
            let param = p(n);
            for q in param.bad_primes() {
                let closed = bad_local_series(&param, q, 1.0).unwrap();
                let mut direct = 0.0;
                for a in 0..60u32 {
                    let pa = (q as f64).powi(a as i32);
                    if pa > 1e7 {
                        break;
                    }
                    direct += rho_prime_power(&param, q, a).unwrap() as f64 / (pa * pa);
                }
                assert!((closed - direct).abs() < 1e-5 * closed, "N={n} p={q}");
            }
        }
    }
}
