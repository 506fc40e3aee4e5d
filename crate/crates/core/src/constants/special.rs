//! Hurwitz zeta and digamma by Euler–Maclaurin summation.

/// `B_{2j} / (2j)!` for `j = 1..=8`.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// `B_{2j} / (2j)` for `j = 1..=8`.
const BERNOULLI_OVER_INDEX: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// Terms summed directly before the Euler–Maclaurin tail.
const SHIFT: usize = 16;

/// `zeta(s, a) = sum_{k >= 0} (k + a)^-s` for real `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1 and a > 0");
    let mut head = 0.0;
    for k in (0..SHIFT).rev() {
        head += (k as f64 + a).powf(-s);
    }
    let x = SHIFT as f64 + a;
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s (s+1) ... (s + 2j - 2) times x^{-s-2j+1}
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail += b * rising * power;
        let k = 2 * j as u32 + 1;
        rising *= (s + k as f64) * (s + k as f64 + 1.0);
        power /= x * x;
    }
    head + tail
}

/// `psi(x) = Gamma'(x) / Gamma(x)` for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma needs x > 0");
    let mut shift = 0.0;
    let mut y = x;
    while y < SHIFT as f64 {
        shift -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    let mut p = inv2;
    for b in BERNOULLI_OVER_INDEX {
        series += b * p;
        p *= inv2;
    }
    shift + y.ln() - 0.5 / y - series
}
