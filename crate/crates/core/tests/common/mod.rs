//! Golden data and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use chordlog::diagrams::enumerate::enumerate_decorated;
use chordlog::apoly::{AMonomial, APolynomial};
use chordlog::diagrams::DiagramType;
use chordlog::expansions::NormalForm;
use chordlog::rational::frac;
use chordlog::symexpr::LogExpr;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;

pub fn ty(delta: u32, gaps: &[(u32, u32)], nts: &[u32]) -> DiagramType {
    DiagramType::new(delta, gaps.to_vec(), nts.to_vec())
}

/// `Σ c · w^{m/s} ln^b w + zc · z` from `(m, b, p, q)` tuples.
pub fn closed(s: u32, terms: &[(i64, u32, i64, i64)], z_coeff: (i64, i64)) -> LogExpr {
    let mut out = LogExpr::zero(s);
    for &(m, b, p, q) in terms {
        out.add_term((m, b), frac(p, q));
    }
    out + LogExpr::z(s).scale(&frac(z_coeff.0, z_coeff.1))
}

/// Σ weight over decorated connected diagrams of size `n`, split by type.
pub fn weighted_counts_by_type(n: u32, s: u32) -> HashMap<DiagramType, BigInt> {
    let mut out: HashMap<DiagramType, BigInt> = HashMap::new();
    for d in enumerate_decorated(n) {
        let w = d.weight(s);
        if w != BigInt::from(0) {
            *out.entry(d.diagram_type()).or_insert_with(|| BigInt::from(0)) += w;
        }
    }
    out
}

pub fn factorial(n: u64) -> BigRational {
    BigRational::from_integer((1..=n).fold(BigInt::from(1), |a, k| a * k))
}

/// Generating functions of the next-to next-to leading-log types (s = 2),
/// with `υ = 1 - 2z` and `ln = ln(1 - 2z)`.
pub fn table_one() -> Vec<(DiagramType, LogExpr)> {
    let nnll_22 = closed(2, &[(0, 0, 17, 24), (1, 2, -1, 8), (1, 0, -5, 6), (3, 0, 1, 6), (4, 0, -1, 24)], (-1, 2));
    let nnll_112 = closed(2, &[(0, 0, 41, 24), (1, 2, -1, 4), (1, 0, -11, 6), (3, 0, 1, 6), (4, 0, -1, 24)], (-3, 2));
    let nnll_1111 = closed(2, &[(0, 0, 1, 1), (1, 2, -1, 8), (1, 0, -1, 1)], (-1, 1));
    let two_x = closed(2, &[(0, 0, -3, 8), (1, 0, 1, 3), (1, 1, 1, 2), (4, 0, 1, 24)], (3, 2));
    let gap_x = closed(2, &[(0, 0, 7, 8), (4, 0, 1, 8), (3, 0, -1, 2), (1, 0, -1, 2)], (-3, 2));
    let three_nt = closed(2, &[(0, 0, 7, 24), (4, 0, 1, 24), (3, 0, -1, 6), (1, 0, -1, 6)], (-1, 2));
    let three = closed(2, &[(0, 0, 3, 8), (4, 0, -1, 24), (1, 0, -1, 3)], (-1, 2));
    vec![
        (ty(1, &[], &[2, 2]), nnll_22),
        (ty(1, &[(1, 1)], &[2]), nnll_112),
        (ty(1, &[(1, 1), (1, 1)], &[]), nnll_1111),
        (ty(2, &[], &[2]), two_x.clone()),
        (ty(2, &[(1, 1)], &[]), two_x),
        (ty(1, &[(2, 1)], &[]), gap_x.clone()),
        (ty(1, &[(1, 2)], &[]), gap_x),
        (ty(1, &[], &[3]), three_nt),
        (ty(3, &[], &[]), three),
    ]
}

/// The fourteen-term `F_{3,{(2,1),(2,1)},{4}}` at s = 2.
pub fn fourteen_term() -> LogExpr {
    closed(
        2,
        &[
            (16, 0, 1, 78274560),
            (14, 0, -1, 3311616),
            (12, 0, 1, 168960),
            (11, 0, -1, 55440),
            (10, 0, 1, 129024),
            (9, 0, 1, 14112),
            (8, 0, -17, 86016),
            (7, 0, 1, 3920),
            (6, 0, -1, 6144),
            (4, 0, 1, 10752),
            (3, 0, -1, 12012),
            (2, 0, 169, 4515840),
            (1, 0, -1, 110880),
            (0, 0, 37, 39739392),
        ],
        (0, 1),
    )
}

/// `F_{1,∅,{2}}` for general `s >= 2`:
/// `(s(s+z-2) + w^{1/s}((s-1) ln w - (s-2) s)) / (s(s-1))`.
pub fn f_one_two_general(s: u32) -> LogExpr {
    let si = s as i64;
    let den = si * (si - 1);
    closed(s, &[(0, 0, si * (si - 2), den), (1, 1, si - 1, den), (1, 0, -(si - 2) * si, den)], (si, den))
}

/// Parses sums of products like `2*a10^4*a22 - a20^3`, indices single digit.
pub fn poly(text: &str) -> APolynomial {
    let mut out = APolynomial::zero();
    let cleaned = text.replace(' ', "");
    let mut rest = cleaned.as_str();
    while !rest.is_empty() {
        let (neg, body) = match rest.as_bytes()[0] {
            b'-' => (true, &rest[1..]),
            b'+' => (false, &rest[1..]),
            _ => (false, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let mut term = AMonomial::constant(frac(if neg { -1 } else { 1 }, 1));
        for factor in body[..end].split('*') {
            if let Some(sym) = factor.strip_prefix('a') {
                let (idx, p) = sym.split_once('^').map_or((sym, 1), |(a, b)| (a, b.parse().unwrap()));
                let b = idx.as_bytes();
                term = &term * &AMonomial::a_pow((b[0] - b'0') as u32, (b[1] - b'0') as u32, p);
            } else {
                term = term.scale(&frac(factor.parse().unwrap(), 1));
            }
        }
        out.add_monomial(&term);
        rest = &body[end..];
    }
    out
}

/// `Σ c · z^p · u^{m/s} ln^b u` rewritten in the pure `u`-basis, with
/// `u = 1 + s a_{1,0} z`. Tuples are `(c, p, m, b)`.
pub fn u_form(s: u32, terms: &[(APolynomial, u32, i64, u32)]) -> NormalForm {
    let mut out = NormalForm::new();
    for (c, p, m, b) in terms {
        // z^p = ((u - 1) / (s a_{1,0}))^p
        for j in 0..=*p {
            let mut coeff = BigRational::from_integer(chordlog::diagrams::binomial(*p as i64, j))
                / BigRational::from_integer(BigInt::from(s).pow(*p));
            if (p - j) % 2 == 1 {
                coeff = -coeff;
            }
            let term = c.mul_monomial(&AMonomial::a_pow(1, 0, -(*p as i32)).scale(&coeff));
            *out.entry((m + j as i64 * s as i64, *b)).or_default() += term;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

pub fn negate(nf: &NormalForm) -> NormalForm {
    nf.iter().map(|(k, v)| (*k, -v)).collect()
}

fn over(num: &str, den: &str) -> APolynomial {
    let d = poly(den).monomials().remove(0);
    poly(num).mul_monomial(&d.inverse())
}

/// Reference closed forms of `H_k`, as `(s, k, form, stated with the
/// opposite overall sign)`.
pub fn reference_expansions() -> Vec<(u32, u32, NormalForm, bool)> {
    let nll = "a20 + a11*a10";
    let nll_sq = "a20^2 + 2*a20*a11*a10 + a11^2*a10^2";
    let h2_z = "-a20^2 + 3*a10^3*a12 + 3*a21*a10^2 - a11*a20*a10 + a30*a10";
    let h3_const = "2*a10^4*a22 + 2*a10^3*a31 - a10^2*a20*a21 + a10^2*a40 - 2*a10*a20*a30 + a20^3";
    let h3_inv = "a20*a10^2*a21 + a20*a10*a30 - a20^3";
    let h3_inv2 = "2*a10^4*a22 + 2*a10^3*a31 + a10^2*a40 + a10^2*a20*a21 - a20^3";
    vec![
        (2, 0, u_form(2, &[(poly("1"), 0, 1, 0), (poly("-1"), 0, 0, 0)]), false),
        (2, 1, u_form(2, &[(-over(nll, "2*a10"), 0, -1, 1)]), true),
        (
            2,
            2,
            u_form(
                2,
                &[
                    (over(nll_sq, "8*a10^2"), 0, -3, 2),
                    (-over(nll_sq, "2*a10^2"), 0, -3, 1),
                    (-over(h2_z, "a10"), 1, -3, 0),
                ],
            ),
            true,
        ),
        (1, 0, u_form(1, &[(poly("-a10"), 1, 0, 0)]), true),
        (1, 1, u_form(1, &[(-over("a20", "a10"), 0, 0, 1)]), true),
        (
            1,
            2,
            u_form(
                1,
                &[(-over("a20^2", "a10^2"), 0, -1, 1), (-over("-a20^2 + a30*a10 + a21*a10^2", "a10"), 1, -1, 0)],
            ),
            true,
        ),
        (
            1,
            3,
            u_form(
                1,
                &[
                    (-over(h3_const, "2*a10^3"), 0, 0, 0),
                    (-over(h3_inv, "a10^3"), 0, -1, 0),
                    (over("a20^3", "2*a10^3"), 0, -2, 2),
                    (over("-2*a10*a20*a30 - 2*a10^2*a20*a21", "2*a10^3"), 0, -2, 1),
                    (over(h3_inv2, "2*a10^3"), 0, -2, 0),
                ],
            ),
            true,
        ),
    ]
}
