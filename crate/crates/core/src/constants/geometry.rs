//! Area function `alpha(s) = area{(u, v) in [0, 1]^2 : v^2 + N u^2 <= s^2}`
//! and the integrals of `alpha(s)/s` entering the second-order constant.

use std::f64::consts::PI;

/// Absolute target handed to the double-exponential rule per piece.
const QUAD_TOLERANCE: f64 = 1e-14;

/// `int_0^w sqrt(s^2 - t^2) dt` for `0 <= w <= s`.
fn circle_primitive(s: f64, w: f64) -> f64 {
    let w = w.min(s);
    let ratio = (w / s).clamp(-1.0, 1.0);
    0.5 * w * (s * s - w * w).max(0.0).sqrt() + 0.5 * s * s * ratio.asin()
}

pub fn alpha(n: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let root_n = n.sqrt();
    let u_end = (s / root_n).min(1.0);
    let u0 = ((s * s - 1.0).max(0.0) / n).sqrt().min(u_end);
    let capped = u0;
    let curved = (circle_primitive(s, root_n * u_end) - circle_primitive(s, root_n * u0)) / root_n;
    capped + curved
}

/// `int_a^b f` split at the kinks `1, sqrt(N), sqrt(N+1)` of `alpha`.
/// Returns the value and the summed error estimate.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(n: f64, a: f64, b: f64, f: F) -> (f64, f64) {
    let mut cuts = vec![a];
    for k in [1.0, n.sqrt(), (n + 1.0).sqrt()] {
        if k > a && k < b {
            cuts.push(k);
        }
    }
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut value = 0.0;
    let mut err = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let out = quadrature::integrate(&f, w[0], w[1], QUAD_TOLERANCE);
            value += out.integral;
            err += out.error_estimate;
        }
    }
    (value, err)
}

/// `int_a^b alpha(s)/s ds`.
pub fn alpha_over_s(n: f64, a: f64, b: f64) -> (f64, f64) {
    integrate_piecewise(n, a, b, |s| alpha(n, s) / s)
}

/// `int_1^sqrt(N) (pi s/(4 sqrt N) - alpha(s)/s) ds`: the part of the
/// quarter ellipse cut away by `v <= 1` below `sqrt(N)`.
pub fn overhang(n: f64) -> (f64, f64) {
    let root_n = n.sqrt();
    integrate_piecewise(n, 1.0, root_n, |s| PI * s / (4.0 * root_n) - alpha(n, s) / s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha_grid(n: f64, s: f64) -> f64 {
        let k = 2000;
        let mut inside = 0usize;
        for i in 0..k {
            for j in 0..k {
                let u = (i as f64 + 0.5) / k as f64;
                let v = (j as f64 + 0.5) / k as f64;
                if v * v + n * u * u <= s * s {
                    inside += 1;
                }
            }
        }
        inside as f64 / (k * k) as f64
    }

    #[test]
    fn alpha_against_grid() {
        for n in [1.0, 2.0, 67.0] {
            for s in [0.3, 1.0, 1.2, 1.5, 3.0, 8.0, 8.2] {
                assert!((alpha(n, s) - alpha_grid(n, s)).abs() < 2e-3, "N={n} s={s}");
            }
        }
    }

    #[test]
    fn alpha_limits() {
        for n in [1.0f64, 2.0, 163.0] {
            assert!((alpha(n, (n + 1.0).sqrt()) - 1.0).abs() < 1e-15);
            let s = 0.5;
            assert!((alpha(n, s) - PI * s * s / (4.0 * n.sqrt())).abs() < 1e-15);
        }
    }

    #[test]
    fn integral_of_small_s_part() {
        let (v, _) = alpha_over_s(2.0, 0.0, 1.0);
        assert!((v - PI / (8.0 * 2f64.sqrt())).abs() < 1e-10, "{v}");
    }
}
