//! Invariant suites. Each suite returns named checks with a pass flag and a
//! short detail string; nothing here panics on a failed check.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{euler_phi, factor, gcd, ramanujan_sum};
use crate::constants::{
    class_number_formula, e_tail_halfwidth, leading_density, theorem_constants_with, ConstantsConfig,
};
use crate::error::{domain, Result};
use crate::expsums::{geometric_sum_magnitude, sieve_bound_study, MRule};
use crate::rho::{
    character_divisor_sum, convolution_identity, dirichlet_identity_first_failure, lattice_count_ellipse,
    lattice_representations, principal_form_representations, rep_count, rho_full, RhoTable,
};
use crate::sums::{
    brute_force_s, brute_force_s_prefix, count_pairs_divisible_by, hyperbola_s, lattice_count_constrained,
    residual_study_from,
};
use crate::thresholds::Thresholds;
use crate::FormParameter;

pub const SUITES: [&str; 8] = ["bijection", "approx", "sieve", "rho", "constants", "sums", "residuals", "identities"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    #[serde(rename = "N")]
    pub n: u32,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, suite: &'static str, n: u32, name: impl Into<String>, passed: bool, detail: String) {
        self.checks.push(Check { suite, name: name.into(), n, passed, detail });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

/// Scale overrides shared by the suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuiteOptions {
    /// Replaces the suite's default modulus or range bound.
    pub d_max: Option<u64>,
    pub seed: u64,
}

pub fn bijection(param: &FormParameter, d_max: u64) -> Result<Report> {
    let rep = crate::roots::verify_bijection(param, d_max)?;
    let mut r = Report::default();
    let detail = format!(
        "d <= {d_max}: coprime {}, 2-power {}, N | d {}, unsolvable {}, mismatches {}{}",
        rep.coprime_checked,
        rep.seven_even_checked,
        rep.n_divides_checked,
        rep.unsolvable_checked,
        rep.mismatches,
        rep.first_counterexample.as_ref().map(|m| format!(", first at d = {}", m.d)).unwrap_or_default()
    );
    r.push("bijection", param.n(), "roots by lifting = roots from representations", rep.passed(), detail);
    Ok(r)
}

pub fn approx(param: &FormParameter, d_max: u64, th: &Thresholds) -> Result<Report> {
    let st = crate::approx::denominator_statistics(param, d_max)?;
    let mut r = Report::default();
    r.push(
        "approx",
        param.n(),
        "|v/d - a/q| <= 1/q^2 exactly",
        st.invalid == 0,
        format!("{} approximations, {} invalid, {} from the fallback search", st.count, st.invalid, st.fallbacks),
    );
    r.push(
        "approx",
        param.n(),
        format!("c1 > {}", th.approx.c1_floor),
        st.c1_empirical > th.approx.c1_floor,
        format!("q/sqrt(d) in [{:.5}, {:.5}], minimum at {:?}", st.c1_empirical, st.c2_empirical, st.argmin),
    );
    Ok(r)
}

pub fn sieve(param: &FormParameter, th: &Thresholds, d_max: Option<u64>) -> Result<Report> {
    let s = &th.sieve;
    let study = sieve_bound_study(param, s.d_min, d_max.unwrap_or(s.d_max), s.h, MRule::D)?;
    let limit = s.max_growth();
    let worst = study
        .samples
        .windows(2)
        .filter(|w| w[0].d >= s.d_from)
        .map(|w| w[1].bound_ratio / w[0].bound_ratio)
        .fold(0.0, f64::max);
    let mut r = Report::default();
    r.push(
        "sieve",
        param.n(),
        "bound ratio growth per doubling",
        worst <= limit,
        format!(
            "max growth {worst:.4} (limit {limit:.4}) from D = {}, ratios {:?}",
            s.d_from,
            study.samples.iter().map(|x| format!("{:.4}", x.bound_ratio)).collect::<Vec<_>>()
        ),
    );
    Ok(r)
}

fn brute_rho(n: u64, d: u64) -> u64 {
    let sq: Vec<u64> = (0..d).map(|u| u * u % d).collect();
    let mut count = 0;
    for v in 0..d {
        let t = n % d * sq[v as usize] % d;
        let want = (d - t) % d;
        count += sq.iter().filter(|&&s| s == want).count() as u64;
    }
    count
}

pub fn rho(param: &FormParameter, th: &Thresholds, d_max: Option<u64>) -> Result<Report> {
    let t = &th.rho;
    let n = param.n();
    let mut r = Report::default();

    let dm = d_max.unwrap_or(t.d_max_brute);
    let bad: Vec<u64> = (1..=dm)
        .into_par_iter()
        .filter(|&d| rho_full(param, &factor(d as u128).unwrap()).ok() != Some(brute_rho(param.n_u64(), d)))
        .collect();
    r.push("rho", n, "rho(d) = pair count mod d", bad.is_empty(), format!("d <= {dm}, first failure {:?}", bad.first()));

    let km = t.convolution_k_max;
    let bad: Vec<u64> = (1..=km)
        .into_par_iter()
        .filter(|&k| {
            let f = factor(k as u128).unwrap();
            convolution_identity(param, k).ok() != rho_full(param, &f).ok()
        })
        .collect();
    r.push("rho", n, "convolution identity", bad.is_empty(), format!("k <= {km}, first failure {:?}", bad.first()));

    let first = dirichlet_identity_first_failure(param, t.dirichlet_n_max)?;
    r.push(
        "rho",
        n,
        "zeta L G coefficients = rho(n)/n",
        first.is_none(),
        format!("n <= {}, exact integer comparison, first failure {first:?}", t.dirichlet_n_max),
    );

    let a = leading_density(param)?;
    let table = RhoTable::build(param, t.e_check_max as usize)?;
    let ef = table.error_function(a);
    let c_emp = ef.calibrate(t.calibration_max, t.e_safety);
    let worst = (3..=t.e_check_max).map(|y| ef.normalized(y)).fold(0.0, f64::max);
    r.push(
        "rho",
        n,
        "|E(y)| <= C_emp y^(4/3) log^2 y",
        worst <= c_emp,
        format!("3 <= y <= {}: max ratio {worst:.4}, C_emp {c_emp:.4}", t.e_check_max),
    );

    let y = 10_000u64.min(t.e_check_max);
    let ps = table.partial_sums(y, a)?;
    let yf = y as f64;
    let band = (ps.sum_rho_over_d - 2.0 * a * yf).abs() / (yf.powf(1.0 / 3.0) * yf.ln().powi(2));
    r.push(
        "rho",
        n,
        "sum rho(d)/d - 2 A y band",
        band <= t.rho_over_d_c,
        format!("y = {y}: {band:.5} (limit {})", t.rho_over_d_c),
    );
    Ok(r)
}

/// `sum_{d <= y} rho(d)/d^2 - 2 A log y` against `2 int_1^inf E/t^3 + A`.
/// The two differ by `E(y)/y^2 - 2 int_y^inf E/t^3`, so the allowance is
/// `C_emp y^{-2/3} log^2 y + 2 tail(y) + 2 halfwidth(T)`.
pub fn log_moment(param: &FormParameter, th: &Thresholds) -> Result<Report> {
    let t = &th.rho;
    let cutoff = *th.constants.cutoffs.iter().max().unwrap_or(&t.e_check_max);
    let table = RhoTable::build(param, cutoff.max(t.e_check_max) as usize)?;
    let c = theorem_constants_with(
        &table,
        &ConstantsConfig { cutoff, calibration_max: t.calibration_max, safety: t.e_safety },
    )?;
    let target = 2.0 * c.e_integral.value + c.a;
    let mut r = Report::default();
    for y in [10_000u64, 100_000] {
        let ps = table.partial_sums(y, c.a)?;
        let yf = y as f64;
        let lhs = ps.sum_rho_over_d2 - 2.0 * c.a * yf.ln();
        let allowance = c.c_emp * yf.powf(-2.0 / 3.0) * yf.ln().powi(2)
            + 2.0 * e_tail_halfwidth(c.c_emp, yf)
            + 2.0 * c.e_integral.halfwidth;
        r.push(
            "rho",
            param.n(),
            format!("sum rho/d^2 - 2A log y -> 2 E-integral + A at y = {y}"),
            (lhs - target).abs() <= allowance,
            format!("{lhs:.8} vs {target:.8}, difference {:.2e}, allowance {allowance:.3e}", lhs - target),
        );
    }
    Ok(r)
}

pub fn constants(param: &FormParameter, th: &Thresholds) -> Result<Report> {
    let n = param.n();
    let mut r = Report::default();
    let l1 = crate::constants::l_value(param, 1)?;
    let closed = class_number_formula(param);
    r.push(
        "constants",
        n,
        "L(1) = class number formula",
        (l1 - closed).abs() <= th.constants.l1_tolerance,
        format!("{l1:.15} vs {closed:.15}"),
    );
    let max_cut = *th.constants.cutoffs.iter().max().unwrap_or(&100_000);
    let table = RhoTable::build(param, max_cut.max(th.rho.calibration_max) as usize)?;
    let mut values = Vec::new();
    for &cutoff in &th.constants.cutoffs {
        let cfg = ConstantsConfig { cutoff, calibration_max: th.rho.calibration_max, safety: th.rho.e_safety };
        values.push(theorem_constants_with(&table, &cfg)?);
    }
    let agree = values.windows(2).all(|w| w[0].c2.overlaps(&w[1].c2));
    r.push(
        "constants",
        n,
        "C2 stable across E-integral cutoffs",
        agree,
        values
            .iter()
            .map(|c| format!("T = {}: {:.9} +- {:.3e}", c.cutoff, c.c2.value, c.c2.halfwidth))
            .collect::<Vec<_>>()
            .join("; "),
    );
    if let Some(c) = values.last() {
        let diff = (c.c2.value - c.c2_hyperbola.value).abs();
        r.push(
            "constants",
            n,
            "C2 from both hyperbola splits",
            diff <= 1e-8,
            format!("{:.12} vs {:.12}", c.c2.value, c.c2_hyperbola.value),
        );
        r.push(
            "constants",
            n,
            "A = L1 G1 / 2 and C1 = 4A",
            c.a == c.l1 * c.g1 / 2.0 && c.c1 == 4.0 * c.a,
            format!("A = {:.12}, C1 = {:.12}", c.a, c.c1),
        );
    }
    Ok(r)
}

/// Engine equivalence for all `x <= x_max` (plus `extra`), and the worked anchors.
pub fn sums_oracle(param: &FormParameter, x_max: u64, extra: &[u64]) -> Result<Report> {
    let n = param.n();
    let mut r = Report::default();
    let brute = brute_force_s_prefix(param, x_max)?;
    let mut bad = Vec::new();
    for x in 1..=x_max {
        if hyperbola_s(param, x, false)?.s != brute[x as usize - 1] {
            bad.push(x);
        }
    }
    for &x in extra {
        if hyperbola_s(param, x, false)?.s != brute_force_s(param, x)? {
            bad.push(x);
        }
    }
    r.push(
        "sums",
        n,
        "hyperbola engine = brute force",
        bad.is_empty(),
        format!("x <= {x_max} and {extra:?}, failures {bad:?}"),
    );
    let x = x_max.min(60);
    let h = hyperbola_s(param, x, false)?;
    let mut total = 0;
    for k in 1..=h.b {
        total += count_pairs_divisible_by(param, k, x)?;
    }
    r.push("sums", n, "sum_k pairs divisible by k = R", total == h.r, format!("x = {x}: {total} vs {}", h.r));
    Ok(r)
}

pub fn anchors() -> Result<Report> {
    let mut r = Report::default();
    let two = FormParameter::new(2)?;
    let h = hyperbola_s(&two, 2, false)?;
    r.push(
        "sums",
        2,
        "S_2(2) = 15 with (R, Q, T) = (10, 1, 4)",
        (h.r, h.q, h.t, h.s) == (10, 1, 4, 15) && brute_force_s(&two, 2)? == 15,
        format!("(R, Q, T, S) = ({}, {}, {}, {})", h.r, h.q, h.t, h.s),
    );
    let p163 = FormParameter::new(163)?;
    let s = hyperbola_s(&p163, 1, false)?.s;
    let b = brute_force_s(&p163, 1)?;
    r.push("sums", 163, "S_163(1) = 6", s == 6 && b == 6, format!("hyperbola {s}, brute force {b}"));
    Ok(r)
}

/// Residual slope and decrease over the grid, plus the two-point shadows of
/// the `R`, `Q` and `T` constants.
/// Residual and shadow checks, defined for `N = 2`; `experiment` covers other `N`.
pub fn residuals(param: &FormParameter, th: &Thresholds) -> Result<Report> {
    let n = param.n();
    if n != 2 {
        return domain(format!("the residual suite is defined for N = 2, not {n}; use experiment for other N"));
    }
    let grid = &th.sums.grid;
    if grid.len() < 2 {
        return domain("residual grid needs at least two points");
    }
    let table = RhoTable::build(param, *th.constants.cutoffs.iter().max().unwrap_or(&100_000) as usize)?;
    let c = theorem_constants_with(
        &table,
        &ConstantsConfig {
            cutoff: table.limit() as u64,
            calibration_max: th.rho.calibration_max,
            safety: th.rho.e_safety,
        },
    )?;
    let sums: Vec<_> = grid.iter().map(|&x| hyperbola_s(param, x, true)).collect::<Result<_>>()?;
    let study = residual_study_from(&sums.iter().map(|s| (s.x, s.s)).collect::<Vec<_>>(), &c);
    let slope = study.slope.unwrap_or(f64::NAN);
    let dec = study.decrease_factor.unwrap_or(f64::NAN);
    let listing = study
        .records
        .iter()
        .map(|rec| format!("x = {}: {:.1}", rec.x, rec.residual))
        .collect::<Vec<_>>()
        .join(", ");
    let mut r = Report::default();
    r.push(
        "sums",
        n,
        format!("residual slope <= {}", th.sums.slope_max),
        slope <= th.sums.slope_max,
        format!("slope {slope:.4}; residuals {listing}"),
    );
    r.push(
        "sums",
        n,
        format!("residual/x^2 decreases by >= {}", th.sums.decrease_min),
        dec >= th.sums.decrease_min,
        format!("factor {dec:.4}"),
    );
    let (first, last) = (&sums[0], &sums[sums.len() - 1]);
    let sq = |s: &crate::sums::DecomposedSum| (s.x as f64).powi(2);
    let shadow = |name: &str, f: &dyn Fn(&crate::sums::DecomposedSum) -> f64, target: f64, r: &mut Report| {
        let (e0, e1) = ((f(first) - target).abs(), (f(last) - target).abs());
        r.push("sums", n, name.to_string(), e1 < e0, format!("|diff| {e0:.3e} at x = {} -> {e1:.3e} at x = {}", first.x, last.x));
    };
    shadow("R/(x^2 log x) -> 2A", &|s| s.r as f64 / (sq(s) * (s.x as f64).ln()), 2.0 * c.a, &mut r);
    shadow("Q/x^2 -> A pi sqrt(N)/2 (literal threshold)", &|s| s.wide.unwrap().q as f64 / sq(s), c.q_const, &mut r);
    shadow("T/x^2 -> T constant (literal threshold)", &|s| s.wide.unwrap().t as f64 / sq(s), c.t_const, &mut r);
    Ok(r)
}

pub fn identities(param: &FormParameter, th: &Thresholds, seed: u64) -> Result<Report> {
    let n = param.n();
    let mut r = Report::default();
    let k_max = 10_000u64;

    if !param.half_integral() && n != 1 {
        let bad = (1..=k_max)
            .find(|&k| lattice_representations(param, k) as i64 != 2 * character_divisor_sum(param, k).unwrap());
        r.push("identities", n, "#{i^2 + N j^2 = k} = 2 sum chi(d)", bad.is_none(), format!("k <= {k_max}, first failure {bad:?}"));
        let exceptional = |k: u64| {
            let is_sq = |m: u64| crate::arith::isqrt(m as u128).pow(2) == m as u128;
            is_sq(k) || (k.is_multiple_of(param.n_u64()) && is_sq(k / param.n_u64()))
        };
        let bad = (1..=k_max).filter(|&k| !exceptional(k)).find(|&k| {
            2 * rep_count(param, k) as i64 != character_divisor_sum(param, k).unwrap()
        });
        r.push("identities", n, "r_N(k) = sum chi(d) / 2", bad.is_none(), format!("non-exceptional k <= {k_max}, first failure {bad:?}"));
    }
    if param.half_integral() {
        let w = param.units_count() as i64;
        let bad = (1..=k_max)
            .find(|&k| principal_form_representations(param, k) as i64 != w * character_divisor_sum(param, k).unwrap());
        r.push(
            "identities",
            n,
            "principal form representations = w sum chi(d)",
            bad.is_none(),
            format!("k <= {k_max}, first failure {bad:?}"),
        );
    }

    let mut bad = None;
    'outer: for d in 1..=120u64 {
        for w in -30i128..=130 {
            let closed = ramanujan_sum(w, d)?;
            let direct: f64 = (1..=d)
                .filter(|&u| gcd(u as u128, d as u128) == 1)
                .map(|u| (2.0 * PI * (w.rem_euclid(d as i128) as f64 * u as f64 % d as f64) / d as f64).cos())
                .sum();
            if (closed as f64 - direct).abs() > 1e-8 {
                bad = Some((w, d));
                break 'outer;
            }
        }
        let phi = euler_phi(&factor(d as u128)?) as i128;
        if ramanujan_sum(0, d)? != phi {
            bad = Some((0, d));
            break;
        }
    }
    r.push("identities", n, "Ramanujan sum closed form", bad.is_none(), format!("d <= 120, |w| <= 130, first failure {bad:?}"));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = th.identities.geometric_tolerance;
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d = rng.gen_range(1..=10_000u64);
        let v = rng.gen_range(0..d);
        let h = rng.gen_range(1..=100i64);
        let m = rng.gen_range(1..=10_000u64);
        let g = geometric_sum_magnitude(h, v, d, m);
        let t = (h as u128 * v as u128 % d as u128) as u64;
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for k in 1..=m {
            let angle = 2.0 * PI * ((k as u128 * t as u128 % d as u128) as f64) / d as f64;
            re += angle.cos();
            im += angle.sin();
        }
        let direct = re.hypot(im);
        worst = worst.max((g.magnitude - direct).abs() / direct.max(1.0));
    }
    r.push(
        "identities",
        n,
        "geometric sum closed form",
        worst <= tol,
        format!("1000 samples (seed {seed}), max relative difference {worst:.2e}"),
    );

    let c = th.lattice.ellipse_c;
    let mut worst: f64 = 0.0;
    let mut x = 1.0f64;
    while x <= th.lattice.ellipse_x_max as f64 {
        let count = lattice_count_ellipse(param, x)? as f64;
        worst = worst.max((count - PI * x / (n as f64).sqrt()).abs() / x.sqrt());
        x = (x * 1.01).max(x + 1.0);
    }
    r.push(
        "identities",
        n,
        "ellipse lattice count band",
        worst <= c,
        format!("max |count - pi X/sqrt N|/sqrt X = {worst:.4} (limit {c})"),
    );

    let nf = n as f64;
    let mut worst: f64 = 0.0;
    for x in 2..=150u64 {
        let lo = (nf * x as f64 / (1.0 + nf).sqrt()).floor() as u64;
        let hi = ((1.0 + nf).sqrt() * x as f64).ceil() as u64;
        for k in lo..=hi {
            if let Ok(l) = lattice_count_constrained(param, k, x) {
                worst = worst.max((l.approximation - l.exact as f64).abs() / x as f64);
            }
        }
    }
    r.push(
        "identities",
        n,
        "constrained lattice count band",
        worst <= th.lattice.constrained_c,
        format!("max |area - count|/x = {worst:.4} (limit {})", th.lattice.constrained_c),
    );
    Ok(r)
}

/// Runs one named suite, or every suite for `"all"`.
pub fn run_suite(name: &str, param: &FormParameter, th: &Thresholds, opts: &SuiteOptions) -> Result<Report> {
    let theorem = [1u32, 2, 67, 163].contains(&param.n());
    let mut r = Report::default();
    match name {
        "bijection" => r.extend(bijection(param, opts.d_max.unwrap_or(10_000))?),
        "approx" => r.extend(approx(&FormParameter::for_theorem_paths(param.n())?, opts.d_max.unwrap_or(th.approx.d_max), th)?),
        "sieve" => r.extend(sieve(&FormParameter::for_theorem_paths(param.n())?, th, opts.d_max)?),
        "rho" => {
            r.extend(rho(param, th, opts.d_max)?);
            if theorem {
                r.extend(log_moment(param, th)?);
            }
        }
        "constants" => r.extend(constants(&FormParameter::for_theorem_paths(param.n())?, th)?),
        "sums" => {
            r.extend(sums_oracle(param, opts.d_max.unwrap_or(th.sums.oracle_x_max), &[])?);
            r.extend(anchors()?);
        }
        "residuals" => r.extend(residuals(param, th)?),
        "identities" => r.extend(identities(param, th, opts.seed)?),
        "all" => {
            for s in SUITES {
                if !theorem && matches!(s, "approx" | "sieve" | "constants") || s == "residuals" && param.n() != 2 {
                    continue;
                }
                r.extend(run_suite(s, param, th, opts)?);
            }
        }
        other => return domain(format!("unknown suite {other:?}; expected one of {SUITES:?} or all")),
    }
    Ok(r)
}
