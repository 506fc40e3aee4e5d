//! Acceptance run: one PASS/FAIL line per criterion, with detail lines
//! indented below. Criteria listed in `DOCUMENTED` are known to fail for the
//! reasons recorded in the decisions ledger; they still print FAIL but do not
//! make the process exit nonzero. Any other failure does.

use std::time::Instant;

use qfsum_core::roots::verify_bijection;
use qfsum_core::thresholds::Thresholds;
use qfsum_core::verify::{self, Check, Report};
use qfsum_core::FormParameter;

const THEOREM: [u32; 3] = [2, 67, 163];

/// `(criterion, reason)` for failures that are analysed rather than fixed.
const DOCUMENTED: [(u32, &str); 2] = [
    (4, "c1 floor 0.05 is below reach for N = 163 under gamma = 1/(2 sqrt N): the s-branch floor is sqrt(1/(5N)) = 0.035"),
    (9, "residuals at x <= 4096 are x^(3/2)-sized fluctuations; the slope and decrease tests cannot resolve the x^2 term"),
];

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<Check>,
    seconds: f64,
}

fn param(n: u32) -> FormParameter {
    FormParameter::new(n).expect("valid N")
}

fn run(id: u32, title: &'static str, f: impl FnOnce() -> qfsum_core::Result<Report>) -> Criterion {
    let start = Instant::now();
    let checks = match f() {
        Ok(r) => r.checks,
        Err(e) => vec![Check { suite: "error", name: "computation".into(), n: 0, passed: false, detail: e.to_string() }],
    };
    Criterion { id, title, checks, seconds: start.elapsed().as_secs_f64() }
}

fn only(report: Report, names: &[&str]) -> Report {
    Report { checks: report.checks.into_iter().filter(|c| names.iter().any(|n| c.name.starts_with(n))).collect() }
}

fn main() {
    let th = Thresholds::default();
    let mut criteria = Vec::new();

    criteria.push(run(1, "engine equivalence", || {
        let mut r = Report::default();
        for n in THEOREM {
            let extra: &[u64] = if n == 2 { &th.sums.spot_checks } else { &[] };
            r.extend(only(verify::sums_oracle(&param(n), th.sums.oracle_x_max, extra)?, &["hyperbola engine"]));
        }
        Ok(r)
    }));

    criteria.push(run(2, "worked anchors", verify::anchors));

    criteria.push(run(3, "root bijection", || {
        let mut r = Report::default();
        for n in THEOREM {
            r.extend(verify::bijection(&param(n), 10_000)?);
        }
        r.extend(verify::bijection(&param(7), 512)?);
        let seven = verify_bijection(&param(7), 512)?;
        r.checks.push(Check {
            suite: "bijection",
            name: "2-power branch exercised".into(),
            n: 7,
            passed: seven.seven_even_checked > 0,
            detail: format!("{} solvable even moduli through the 2-power pairing", seven.seven_even_checked),
        });
        Ok(r)
    }));

    criteria.push(run(4, "rational approximations", || {
        let mut r = Report::default();
        for n in THEOREM {
            r.extend(verify::approx(&param(n), th.approx.d_max, &th)?);
        }
        Ok(r)
    }));

    criteria.push(run(5, "large sieve growth", || {
        let mut r = Report::default();
        for n in THEOREM {
            r.extend(verify::sieve(&param(n), &th, None)?);
        }
        Ok(r)
    }));

    criteria.push(run(6, "rho certification", || {
        let mut r = Report::default();
        for n in THEOREM {
            r.extend(only(verify::rho(&param(n), &th, None)?, &["rho(d) =", "convolution", "zeta L G"]));
        }
        Ok(r)
    }));

    criteria.push(run(7, "error term and log moment", || {
        let mut r = Report::default();
        for n in THEOREM {
            r.extend(only(verify::rho(&param(n), &th, Some(1))?, &["|E(y)|"]));
            r.extend(verify::log_moment(&param(n), &th)?);
        }
        Ok(r)
    }));

    criteria.push(run(8, "constants", || {
        let mut r = Report::default();
        for n in THEOREM {
            r.extend(only(verify::constants(&param(n), &th)?, &["L(1)", "C2 stable"]));
        }
        Ok(r)
    }));

    criteria.push(run(9, "residual shadow", || {
        Ok(only(verify::residuals(&param(2), &th)?, &["residual"]))
    }));

    criteria.push(run(10, "identity suite", || {
        let mut r = Report::default();
        for n in THEOREM {
            r.extend(only(
                verify::identities(&param(n), &th, 20_240_601)?,
                &["#{i^2", "r_N", "principal form", "Ramanujan", "geometric"],
            ));
        }
        Ok(r)
    }));

    let mut undocumented = Vec::new();
    for c in &criteria {
        let passed = c.checks.iter().all(|k| k.passed) && !c.checks.is_empty();
        let documented = DOCUMENTED.iter().find(|(id, _)| *id == c.id);
        let note = match (passed, documented) {
            (false, Some((_, why))) => format!("  [documented: {why}]"),
            (true, Some(_)) => "  [documented failure no longer occurs]".to_string(),
            _ => String::new(),
        };
        println!("{} {:>2} {} ({:.1}s){note}", if passed { "PASS" } else { "FAIL" }, c.id, c.title, c.seconds);
        for k in &c.checks {
            println!("       {} N={} {}: {}", if k.passed { "ok  " } else { "FAIL" }, k.n, k.name, k.detail);
        }
        if !passed && documented.is_none() {
            undocumented.push(c.id);
        }
    }
    if !undocumented.is_empty() {
        eprintln!("undocumented failures: {undocumented:?}");
        std::process::exit(1);
    }
}
