//! The large-sieve sum
//! `S(D, H, M; N) = sum_{D < d <= 2D} sum_{v} sum_{h <= H} (1/h) |sum_{n <= M} e(h n v / d)|`
//! over roots `v` of `v^2 + N = 0 (mod d)`, and its bound study.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::roots::RootTable;
use crate::FormParameter;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricSum {
    /// `|sum_{n=1}^{M} e(n theta)|` with `theta = h v / d`.
    pub magnitude: f64,
    /// `min(M, 1 / (2 ||theta||))`.
    pub bound: f64,
}

/// Closed form of `|sum_{n<=M} e(n h v / d)|` as `|sin(pi M t/d) / sin(pi t/d)|`
/// with `t = h v mod d`; the angle `M t / d` is reduced exactly modulo 2.
pub fn geometric_sum_magnitude(h: i64, v: u64, d: u64, m: u64) -> GeometricSum {
    let d128 = d as i128;
    let t = ((h as i128 % d128) * (v as i128 % d128)).rem_euclid(d128) as u128;
    if t == 0 {
        return GeometricSum { magnitude: m as f64, bound: m as f64 };
    }
    let d = d as u128;
    let mt = (m as u128 * t) % (2 * d);
    let num = (std::f64::consts::PI * mt as f64 / d as f64).sin();
    let den = (std::f64::consts::PI * t as f64 / d as f64).sin();
    let dist = t.min(d - t) as f64 / d as f64;
    GeometricSum { magnitude: (num / den).abs(), bound: (m as f64).min(0.5 / dist) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SieveSumSample {
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub value: f64,
    pub bound_ratio: f64,
}

fn contribution(table: &RootTable, d: u64, h_max: u64, m: u64) -> f64 {
    let mut acc = CompensatedSum::default();
    for &v in table.roots(d as usize) {
        for h in 1..=h_max {
            acc.add(geometric_sum_magnitude(h as i64, v as u64, d, m).magnitude / h as f64);
        }
    }
    acc.value()
}

fn check(param: &FormParameter, d: u64, h: u64, m: u64) -> Result<()> {
    if ![1, 2, 67, 163].contains(&param.n()) {
        return domain(format!("large sieve sum is defined for N in {{1, 2, 67, 163}}, not {}", param.n()));
    }
    if d == 0 || h == 0 || m == 0 {
        return domain("D, H and M must be positive");
    }
    Ok(())
}

/// `S(D, H, M; N)` with a root table covering `2D`. The per-`d`
/// contributions are computed in parallel and then added in ascending `d`,
/// so the result does not depend on the thread count.
pub fn large_sieve_sum_with(table: &RootTable, d: u64, h: u64, m: u64) -> SieveSumSample {
    assert!(table.limit() as u64 >= 2 * d, "root table too small");
    let parts: Vec<f64> = (d + 1..=2 * d)
        .into_par_iter()
        .map(|dd| contribution(table, dd, h, m))
        .collect();
    let value = parts.into_iter().collect::<CompensatedSum>().value();
    let bound_ratio = value / ((d + m) as f64 * (d as f64).sqrt());
    SieveSumSample { d, h, m, value, bound_ratio }
}

pub fn large_sieve_sum(param: &FormParameter, d: u64, h: u64, m: u64) -> Result<SieveSumSample> {
    check(param, d, h, m)?;
    let table = RootTable::build(param, 2 * d as usize);
    Ok(large_sieve_sum_with(&table, d, h, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum MRule {
    D,
    SqrtD,
    DSquared,
}

impl MRule {
    pub fn apply(&self, d: u64) -> u64 {
        match self {
            MRule::D => d,
            MRule::SqrtD => (crate::arith::isqrt(d as u128) as u64).max(1),
            MRule::DSquared => d * d,
        }
    }
}

impl std::str::FromStr for MRule {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "D" | "d" => Ok(MRule::D),
            "sqrtD" | "sqrt" => Ok(MRule::SqrtD),
            "D2" | "DSquared" | "d2" => Ok(MRule::DSquared),
            _ => Err(format!("unknown M rule {s:?} (expected D, sqrtD or D2)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SieveStudy {
    pub samples: Vec<SieveSumSample>,
    pub max_bound_ratio: f64,
    /// `ratio(D_{i+1}) / ratio(D_i)` for consecutive grid points.
    pub growth: Vec<f64>,
}

/// Samples over the dyadic grid `d_min, 2 d_min, ..., <= d_max`.
pub fn sieve_bound_study(
    param: &FormParameter,
    d_min: u64,
    d_max: u64,
    h: u64,
    rule: MRule,
) -> Result<SieveStudy> {
    check(param, d_min, h, 1)?;
    if d_max < d_min {
        return domain("empty D grid");
    }
    let mut grid = Vec::new();
    let mut d = d_min;
    while d <= d_max {
        grid.push(d);
        d *= 2;
    }
    let table = RootTable::build(param, 2 * *grid.last().unwrap() as usize);
    let samples: Vec<SieveSumSample> =
        grid.iter().map(|&d| large_sieve_sum_with(&table, d, h, rule.apply(d))).collect();
    let max_bound_ratio = samples.iter().map(|s| s.bound_ratio).fold(0.0, f64::max);
    let growth = samples.windows(2).map(|w| w[1].bound_ratio / w[0].bound_ratio).collect();
    Ok(SieveStudy { samples, max_bound_ratio, growth })
}
