mod common;

use chordlog::diagrams::DiagramType;
use chordlog::rational::int;
use chordlog::symexpr::LogExpr;
use chordlog::typegf::{enumerate_types, f_of_type, f_of_type_uncached};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use common::*;

#[test]
fn matches_weighted_enumeration() {
    let types = enumerate_types(2);
    for s in 1..=3 {
        for n in 1..=7u32 {
            let counts = weighted_counts_by_type(n, s);
            for t in &types {
                let f = &f_of_type(t, s).f;
                let got = f.coefficient(n as usize) * factorial(n as u64);
                let expect = BigRational::from_integer(counts.get(t).cloned().unwrap_or_default());
                assert_eq!(got, expect, "type {t}, s = {s}, n = {n}");
            }
        }
    }
}

#[test]
fn table_one_entries() {
    for (t, expect) in table_one() {
        assert_eq!(f_of_type(&t, 2).f, expect, "type {t}");
    }
}

#[test]
fn general_s_and_large_example() {
    for s in 2..=5 {
        assert_eq!(f_of_type(&ty(1, &[], &[2]), s).f, f_one_two_general(s), "s = {s}");
    }
    assert_eq!(f_of_type(&ty(3, &[(2, 1), (2, 1)], &[4]), 2).f, fourteen_term());
    assert_eq!(f_of_type(&ty(2, &[], &[]), 2).f, closed(2, &[(0, 0, 1, 1), (1, 0, -1, 1)], (-1, 1)));
}

#[test]
fn vanish_at_origin_and_nonnegative() {
    for t in enumerate_types(3) {
        for s in 1..=3 {
            let f = &f_of_type(&t, s).f;
            assert!(f.eval_origin().is_zero(), "{t}");
            for c in f.coefficients(10) {
                assert!(!c.is_negative(), "{t} s = {s}");
            }
        }
    }
}

#[test]
fn closure_of_seed_reproduces_f() {
    let t = ty(1, &[(1, 1)], &[2]);
    let entry = f_of_type_uncached(&t, 3);
    let seed = entry.base_a.clone().unwrap();
    assert_eq!(seed.root_insertion_closure(), entry.f);
    assert_eq!(entry.f, f_of_type(&t, 3).f);
}

#[test]
fn root_insertion_is_sn_minus_one_to_one() {
    for s in 1..=3u32 {
        for n in 1..=6u32 {
            let mut coeffs = vec![int(0); n as usize + 1];
            coeffs[n as usize] = BigRational::from_integer(1.into()) / factorial(n as u64);
            let closed = LogExpr::from_z_polynomial(&coeffs, s).root_insertion_closure();
            let got = closed.coefficient(n as usize + 1) * factorial(n as u64 + 1);
            assert_eq!(got, int(s as i64 * n as i64 - 1), "s = {s}, n = {n}");
        }
    }
}

#[test]
fn type_json() {
    let entry = f_of_type(&DiagramType::new(1, vec![(1, 1)], vec![]), 2);
    let text = serde_json::to_string(&*entry).unwrap();
    assert!(text.starts_with(r#"{"type":{"delta":1,"gaps":[[1,1]],"nonterminals":[]},"s":2,"F":{"s":2,"terms":"#));
}
