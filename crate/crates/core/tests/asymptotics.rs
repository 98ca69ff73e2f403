mod common;

use chordlog::apoly::AValues;
use chordlog::asymptotics::*;
use chordlog::rational::{frac, int};
use chordlog::typegf::{enumerate_types, f_of_type};
use num_bigint::BigInt;

use common::*;

fn unit_values() -> AValues {
    AValues::uniform(3, 2, int(1))
}

fn ratio_at(report: &ConvergenceReport, n: usize) -> f64 {
    report.rows.iter().find(|r| r.n == n).unwrap().ratio
}

#[test]
fn leading_log_ratio_converges() {
    let report = convergence_report(0, 2, 10_000, &AValues::new().with(1, 0, int(1))).unwrap();
    let (r3, r4) = (ratio_at(&report, 1000), ratio_at(&report, 10_000));
    assert!((r4 - 1.0).abs() < 0.1, "{r4}");
    assert!((r4 - 1.0).abs() < (r3 - 1.0).abs(), "{r3} {r4}");
    assert!(report.sign_mismatches.is_empty());
    let last = report.rows.last().unwrap();
    assert!((last.neighbor_ratio - report.neighbor_limit).abs() < 1e-3);
}

#[test]
fn leading_log_exact_values() {
    // [z^n] H_0 = (-1)^{n+1} (2n-3)!! / n! at s = 2, a_{1,0} = 1.
    let mut checked = 0;
    for_each_hk_coefficient(0, 2, &AValues::new().with(1, 0, int(1)), 60, |c| {
        let n = c.n as u64;
        let dfact: BigInt = (1..n).map(|i| BigInt::from(2 * i - 1)).product();
        let mut expect = num_rational::BigRational::new(dfact, chordlog::rational::factorial(n));
        if n % 2 == 0 {
            expect = -expect;
        }
        assert_eq!(c.to_rational(), expect, "n = {n}");
        checked += 1;
    })
    .unwrap();
    assert_eq!(checked, 60);
}

#[test]
fn higher_orders_trend() {
    for k in 1..=2 {
        let report = convergence_report(k, 2, 10_000, &unit_values()).unwrap();
        let (r3, r4) = (ratio_at(&report, 1000), ratio_at(&report, 10_000));
        assert!((r4 - 1.0).abs() < (r3 - 1.0).abs(), "k = {k}: {r3} {r4}");
        assert!(report.sign_mismatches.is_empty(), "k = {k}");
    }
}

#[test]
fn s1_log_series_exact() {
    // a_{1,1} enters termwise and cancels, so it must be assigned too.
    let vals = unit_values();
    let mut checked = 0;
    for_each_hk_coefficient(1, 1, &vals, 10_000, |c| {
        let n = c.n as i64;
        let sign = if n % 2 == 1 { 1 } else { -1 };
        // [z^n] H_1 = (-1)^{n+1} / n: the raw part is 1/n, compared unreduced.
        assert_eq!(&c.raw.numer * BigInt::from(n), c.raw.denom, "n = {n}");
        assert_eq!(c.sign(), sign, "n = {n}");
        checked += 1;
    })
    .unwrap();
    assert_eq!(checked, 10_000);
    let report = convergence_report(1, 1, 1000, &vals).unwrap();
    assert!(report.rows.iter().all(|r| (r.ratio - 1.0).abs() < 1e-9));
}

#[test]
fn transfer_consistency() {
    let ns = [100, 1000, 10_000];
    for s in 2..=3 {
        for t in enumerate_types(2) {
            let f = &f_of_type(&t, s).f;
            let ratios = transfer_ratios(f, &ns).unwrap();
            let errs: Vec<f64> = ratios.iter().map(|(_, r)| (r - 1.0).abs()).collect();
            assert!(errs[2] < errs[1] && errs[1] < errs[0], "{t} s = {s}: {ratios:?}");
        }
    }
}

#[test]
fn dominant_estimates_and_singularities() {
    for s in 2..=3 {
        for k in 0..=2 {
            for t in dominant_types(k, s).unwrap() {
                let f = &f_of_type(&t, s).f;
                let term = leading_singular_term(f).unwrap();
                assert_eq!((term.alpha.clone(), term.b), (frac(1, s as i64), k), "{t}");
                let est = coefficient_estimate(&t, s).unwrap();
                let logs = coefficient_logs(f, &[1000, 10_000]);
                let errs: Vec<f64> = logs.iter().map(|&(n, sg, ln)| (est.ratio(n, sg, ln) - 1.0).abs()).collect();
                assert!(errs[1] < errs[0], "{t} s = {s}: {errs:?}");
                if k == 0 {
                    assert!(errs[1] < 0.05);
                }
            }
        }
    }
    // s = 1: ln(n)^{k-1} n^{-2} / (k-1)!
    for k in 1..=3 {
        let t = &dominant_types(k, 1).unwrap()[0];
        let est = coefficient_estimate(t, 1).unwrap();
        let logs = coefficient_logs(&f_of_type(t, 1).f, &[1000, 10_000]);
        let errs: Vec<f64> = logs.iter().map(|&(n, sg, ln)| (est.ratio(n, sg, ln) - 1.0).abs()).collect();
        assert!(errs[1] < errs[0], "{t}: {errs:?}");
    }
}

#[test]
fn non_dominant_types_vanish_relatively() {
    for s in 1..=2u32 {
        for k in 1..=2u32 {
            let dominant = &dominant_types(k, s).unwrap()[0];
            let dom_logs = coefficient_logs(&f_of_type(dominant, s).f, &[1000, 10_000]);
            for t in enumerate_types(k).into_iter().filter(|t| t.t_value() == k) {
                if dominant_types(k, s).unwrap().contains(&t) {
                    continue;
                }
                let logs = coefficient_logs(&f_of_type(&t, s).f, &[1000, 10_000]);
                let rel: Vec<f64> = logs.iter().zip(&dom_logs).map(|(a, b)| (a.2 - b.2).exp()).collect();
                // Identically zero for large n counts as negligible.
                assert!(rel[1] < rel[0] || rel == [0.0, 0.0], "{t} against {dominant}, s = {s}: {rel:?}");
            }
        }
    }
}

#[test]
fn singular_constant_diagnostic() {
    let note = singular_constant_note(&ty(1, &[(1, 1)], &[]), 2).unwrap();
    assert_eq!(note.observed, frac(1, 2));
    assert_eq!(note.implied_by_estimate, frac(1, 2));
    assert_eq!(note.reference, frac(-1, 4));
    for s in 2..=3 {
        for k in 0..=3 {
            for t in dominant_types(k, s).unwrap() {
                let note = singular_constant_note(&t, s).unwrap();
                assert_eq!(note.observed, note.implied_by_estimate, "{t} s = {s}");
            }
        }
    }
}

#[test]
fn report_formats() {
    let report = convergence_report(1, 2, 20, &unit_values()).unwrap();
    let csv = report.to_csv();
    assert!(csv.starts_with("n,exact,estimate,ratio,neighbor_ratio\n10,"));
    assert_eq!(csv.lines().count(), 3);
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["rows"][1]["n"], 20);
    assert!(matches!(convergence_report(1, 2, 5, &unit_values()), Err(AsymptoticsError::RangeTooShort(5))));
}
