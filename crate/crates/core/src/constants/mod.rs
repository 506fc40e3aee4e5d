//! `L(1, chi_N)`, `L(2, chi_N)`, `G_N`, `A_N`, the E-integral and the
//! coefficients `C1 = A_1(N)`, `C2 = A_2(N)` with uncertainty halfwidths.

mod geometry;
mod lfunc;
mod special;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::expsums::CompensatedSum;
use crate::rho::RhoTable;
use crate::FormParameter;

pub use geometry::{alpha, alpha_over_s, overhang};
pub use lfunc::{
    bad_local_factor, bad_local_series, class_number_formula, g_closed, g_euler_truncated, l_value,
};
pub use special::{digamma, hurwitz_zeta};

/// Exponent `b` in the tail integrand `t^{-1-b} log^2 t` of the E-integral.
const TAIL_EXPONENT: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub halfwidth: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, halfwidth: 0.0 }
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.halfwidth
    }

    pub fn overlaps(&self, other: &Estimate) -> bool {
        (self.value - other.value).abs() <= self.halfwidth + other.halfwidth
    }
}

/// `A_N = L(1, chi) G_N(1) / 2`, the leading coefficient of `sum_{d <= y} rho(d)`.
pub fn leading_density(param: &FormParameter) -> Result<f64> {
    Ok(l_value(param, 1)? * g_closed(param, 1)? / 2.0)
}

/// `C_emp = safety * max_{3 <= y <= y_max} |E_N(y)| / (y^{4/3} log^2 y)`.
pub fn calibrate_error_constant(table: &RhoTable, a: f64, y_max: u64, safety: f64) -> Result<f64> {
    if y_max < 3 || y_max as usize > table.limit() {
        return domain(format!("calibration range 3..={y_max} outside the table"));
    }
    Ok(table.error_function(a).calibrate(y_max, safety))
}

/// `int_T^inf c t^{4/3} log^2 t / t^3 dt` in closed form.
pub fn e_tail_halfwidth(c_emp: f64, cutoff: f64) -> f64 {
    let b = TAIL_EXPONENT;
    let l = cutoff.ln();
    c_emp * cutoff.powf(-b) * (l * l / b + 2.0 * l / (b * b) + 2.0 / (b * b * b))
}

/// `int_1^T E_N(t)/t^3 dt` summed exactly over unit pieces, with the tail
/// beyond `T` bounded through `|E_N(t)| <= C_emp t^{4/3} log^2 t`.
pub fn e_integral(table: &RhoTable, a: f64, cutoff: u64, c_emp: f64) -> Result<Estimate> {
    if cutoff < 1 {
        return domain("cutoff T must be at least 1");
    }
    if cutoff as usize > table.limit() {
        return domain(format!("cutoff {cutoff} beyond the rho table limit {}", table.limit()));
    }
    let mut acc = CompensatedSum::default();
    for k in 1..cutoff {
        let kf = k as f64;
        let s = table.partial_rho(k as usize) as f64;
        let weight = (2.0 * kf + 1.0) / (2.0 * kf * kf * (kf + 1.0) * (kf + 1.0));
        acc.add(s * weight - a * (1.0 / kf).ln_1p());
    }
    Ok(Estimate { value: acc.value(), halfwidth: e_tail_halfwidth(c_emp, cutoff as f64) })
}

/// Settings for [`theorem_constants`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstantsConfig {
    /// E-integral cutoff `T`.
    pub cutoff: u64,
    /// Upper end of the `C_emp` calibration range.
    pub calibration_max: u64,
    /// Multiplier on the calibrated maximum.
    pub safety: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig { cutoff: 100_000, calibration_max: 1_000, safety: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AsymptoticConstants {
    #[serde(rename = "N")]
    pub n: u32,
    /// `N = 1` lies outside the theorem's set and is provided for cross-checks.
    pub flagged: bool,
    pub l1: f64,
    pub l2: f64,
    pub g1: f64,
    pub g2: f64,
    /// `L(1) G(1) / 2`.
    pub a: f64,
    /// `L(1) G(2) / 2`, the literal leading constant.
    pub a_literal: f64,
    pub cutoff: u64,
    pub c_emp: f64,
    pub e_integral: Estimate,
    pub c1: f64,
    pub c2: Estimate,
    /// Same constant from the split of `k l = n^2 + N m^2` at `sqrt(k l)`.
    pub c2_hyperbola: Estimate,
    /// The literal second-order constant.
    pub c2_literal: Estimate,
    /// `R_N(x) / x^2 - 2A log x` limit.
    pub r_const: Estimate,
    /// `Q_N(x) / x^2` limit for the threshold `N x / sqrt(1 + N)`.
    pub q_const: f64,
    /// `pi^2 / (8 L(2))`.
    pub q_const_literal: f64,
    /// `T_N(x) / x^2` limit for the same threshold.
    pub t_const: f64,
    /// The literal closed form for the `T_N` constant.
    pub t_const_literal: f64,
    /// Pairs with `n > x` counted by `Q_N` under the same threshold, per `x^2`.
    pub overcount_const: f64,
    /// `Q_N / x^2` and `T_N / x^2` limits for the threshold `x / sqrt(1 + N)`
    /// with the constraint `m, n <= x` kept.
    pub q_const_exact: f64,
    pub t_const_exact: f64,
}

fn acos_clamped(x: f64) -> f64 {
    assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&x), "arccos argument {x}");
    x.clamp(-1.0, 1.0).acos()
}

pub fn theorem_constants(param: &FormParameter, config: &ConstantsConfig) -> Result<AsymptoticConstants> {
    let table = RhoTable::build(param, config.cutoff.max(config.calibration_max) as usize)?;
    theorem_constants_with(&table, config)
}

/// [`theorem_constants`] reusing a rho table that covers the cutoff.
pub fn theorem_constants_with(table: &RhoTable, config: &ConstantsConfig) -> Result<AsymptoticConstants> {
    let param = table.param();
    let n = param.n();
    if ![1, 2, 67, 163].contains(&n) {
        return domain(format!("theorem constants are provided for N in {{1, 2, 67, 163}}, not {n}"));
    }
    let nf = n as f64;
    let root_n = nf.sqrt();
    let l1 = l_value(param, 1)?;
    let l2 = l_value(param, 2)?;
    let g1 = g_closed(param, 1)?;
    let g2 = g_euler_truncated(param, 2.0, 1_000_000)?.value;
    let a = l1 * g1 / 2.0;
    let a_literal = l1 * g2 / 2.0;
    let c_emp = calibrate_error_constant(table, a, config.calibration_max, config.safety)?;
    let e = e_integral(table, a, config.cutoff, c_emp)?;
    let hw = 4.0 * e.halfwidth;

    let (t_int, t_err) = alpha_over_s(nf, root_n, (nf + 1.0).sqrt());
    let (over_int, over_err) = overhang(nf);
    let (full_int, full_err) = alpha_over_s(nf, 0.0, (nf + 1.0).sqrt());
    let (exact_int, _) = alpha_over_s(nf, 1.0, (nf + 1.0).sqrt());

    let r_const = Estimate { value: 2.0 * e.value + a * ((1.0 + nf).ln() + 1.0), halfwidth: 2.0 * e.halfwidth };
    let q_const = a * PI * root_n / 2.0;
    let t_const = 4.0 * a * t_int;
    let overcount_const = 4.0 * a * over_int;
    let c2 = Estimate {
        value: 2.0 * r_const.value - q_const - t_const + overcount_const,
        halfwidth: hw + 4.0 * a * (t_err + over_err),
    };
    let c2_hyperbola = Estimate {
        value: 2.0 * a + 4.0 * e.value + 4.0 * a * ((1.0 + nf).sqrt().ln() - full_int),
        halfwidth: hw + 4.0 * a * full_err,
    };

    let q_const_literal = PI * PI / (8.0 * l2);
    let root_n1 = (nf - 1.0).sqrt();
    let angles = nf * acos_clamped((1.0 - 1.0 / nf).sqrt()) + nf * (1.0 / root_n).atan() + root_n.atan()
        - root_n1.atan();
    let t_const_literal = a / root_n * (6.0 * root_n - 3.0 * root_n1 - 2.0 * angles);
    let c2_literal = Estimate {
        value: 4.0 * e.value - q_const_literal
            + a / root_n * (2.0 * root_n * ((nf + 1.0).ln() + 1.0) + 6.0 * root_n - 3.0 * root_n1)
            - 2.0 * a / root_n * angles,
        halfwidth: hw,
    };

    Ok(AsymptoticConstants {
        n,
        flagged: n == 1,
        l1,
        l2,
        g1,
        g2,
        a,
        a_literal,
        cutoff: config.cutoff,
        c_emp,
        e_integral: e,
        c1: 4.0 * a,
        c2,
        c2_hyperbola,
        c2_literal,
        r_const,
        q_const,
        q_const_literal,
        t_const,
        t_const_literal,
        overcount_const,
        q_const_exact: a * PI / (2.0 * root_n),
        t_const_exact: 4.0 * a * exact_int,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> FormParameter {
        FormParameter::new(n).unwrap()
    }

    #[test]
    fn e_integral_edges() {
        let param = p(2);
        let table = RhoTable::build(&param, 1000).unwrap();
        let a = leading_density(&param).unwrap();
        let e = e_integral(&table, a, 1, 1.0).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.halfwidth > 0.0);
        assert!(e_integral(&table, a, 0, 1.0).is_err());
        assert!(e_integral(&table, a, 1001, 1.0).is_err());
        assert!(e_tail_halfwidth(1.0, 4e5) < e_tail_halfwidth(1.0, 1e5));
    }

    #[test]
    fn e_integral_piece_matches_quadrature() {
        let param = p(2);
        let table = RhoTable::build(&param, 50).unwrap();
        let a = leading_density(&param).unwrap();
        let exact = e_integral(&table, a, 50, 1.0).unwrap().value;
        let ef = table.error_function(a);
        let mut quad = 0.0;
        for k in 1..50 {
            quad += quadrature::integrate(|t| ef.at(t.min(k as f64 + 1.0 - 1e-12)) / t.powi(3), k as f64, k as f64 + 1.0, 1e-13).integral;
        }
        assert!((exact - quad).abs() < 1e-9);
    }

    #[test]
    fn n2_constants() {
        let c = theorem_constants(&p(2), &ConstantsConfig { cutoff: 20_000, ..Default::default() }).unwrap();
        assert!((c.l1 - PI / (2.0 * 2f64.sqrt())).abs() < 1e-12);
        assert!((c.a - 0.521_595).abs() < 2e-6);
        assert!((c.c1 - 4.0 * c.a).abs() == 0.0);
        assert!((c.q_const - c.q_const_literal).abs() < 1e-12);
        assert!((c.c2.value - c.c2_hyperbola.value).abs() < 1e-10);
        assert!((c.c2.value - 0.8849).abs() < 1e-3);
        assert!(c.t_const_literal < 0.0);
        assert!(c.q_const_literal > 0.8 && c.q_const_literal < 1.4);
        assert!(!c.flagged);
        assert!(theorem_constants(&p(7), &ConstantsConfig::default()).is_err());
    }

    #[test]
    fn q_const_closed_form_is_special_to_n2() {
        for n in [67u32, 163] {
            let param = p(n);
            let a = leading_density(&param).unwrap();
            let general = a * PI * (n as f64).sqrt() / 2.0;
            let literal = PI * PI / (8.0 * l_value(&param, 2).unwrap());
            assert!((general - literal).abs() > 0.1, "N={n}");
        }
    }
}
