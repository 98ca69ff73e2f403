//! Weighted generating functions `F_{Δ,G,D}` of diagrams of a fixed type.
//!
//! Every diagram of a type arises from a small seed by inserting decoration-1
//! root chords. The seeds are: the one-chord diagram (no gaps, no
//! nonterminals); a decoration-`d` root above a diagram of the type with one
//! `d` removed from `D`; or a root whose deletion disconnects the diagram,
//! described by splitting the type into two smaller ones. The seed series
//! `A` is assembled from recursively computed `F`s and closed under root
//! insertion.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::diagrams::DiagramType;
use crate::rational;
use crate::symexpr::LogExpr;

pub fn t_value(ty: &DiagramType) -> u32 {
    ty.t_value()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeGFEntry {
    #[serde(rename = "type")]
    pub ty: DiagramType,
    pub s: u32,
    #[serde(rename = "F")]
    pub f: LogExpr,
    #[serde(skip)]
    pub base_a: Option<LogExpr>,
}

/// Sorted multisets of `items` whose summed `cost` is at most `budget`,
/// drawn from `candidates` (ascending) with repetition.
fn multisets<T: Copy + Ord>(candidates: &[(T, u32)], budget: u32) -> Vec<(Vec<T>, u32)> {
    fn rec<T: Copy>(cands: &[(T, u32)], start: usize, budget: u32, acc: &mut Vec<T>, used: u32, out: &mut Vec<(Vec<T>, u32)>) {
        out.push((acc.clone(), used));
        for i in start..cands.len() {
            let (item, cost) = cands[i];
            if cost <= budget {
                acc.push(item);
                rec(cands, i, budget - cost, acc, used + cost, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(candidates, 0, budget, &mut Vec::new(), 0, &mut out);
    out
}

/// Every type with t-value at most `k`, ordered by t-value, then `Δ`, then
/// the sorted multisets.
pub fn enumerate_types(k: u32) -> Vec<DiagramType> {
    let mut gap_cands = Vec::new();
    for d in 1..=k {
        for g in 1..=k + 1 - d {
            gap_cands.push(((d, g), d + g - 1));
        }
    }
    let nt_cands: Vec<(u32, u32)> = (2..=k + 1).map(|d| (d, d - 1)).collect();
    let mut out = Vec::new();
    for delta in 1..=k + 1 {
        let budget = k + 1 - delta;
        for (gaps, used) in multisets(&gap_cands, budget) {
            for (nts, _) in multisets(&nt_cands, budget - used) {
                out.push(DiagramType::new(delta, gaps.clone(), nts));
            }
        }
    }
    out.sort_by(|a, b| (a.t_value(), a).cmp(&(b.t_value(), b)));
    out
}

/// Distinct sub-multisets of a sorted multiset, each with its complement.
fn splits<T: Copy + Ord>(items: &[T]) -> Vec<(Vec<T>, Vec<T>)> {
    let mut seen = BTreeSet::new();
    for mask in 0u64..1 << items.len() {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, &x) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                a.push(x);
            } else {
                b.push(x);
            }
        }
        seen.insert((a, b));
    }
    seen.into_iter().collect()
}

fn remove_one<T: PartialEq + Clone>(items: &[T], x: &T) -> Vec<T> {
    let mut out = items.to_vec();
    let pos = out.iter().position(|y| y == x).expect("element present");
    out.remove(pos);
    out
}

fn dedup_sorted<T: Clone + PartialEq>(items: &[T]) -> Vec<T> {
    let mut out: Vec<T> = items.to_vec();
    out.dedup();
    out
}

/// `z^d / d!`, the one-chord diagram of decoration `d`.
fn monomial(d: u32, s: u32) -> LogExpr {
    let mut coeffs = vec![BigRational::from_integer(0.into()); d as usize + 1];
    coeffs[d as usize] = BigRational::new(1.into(), rational::factorial(d as u64));
    LogExpr::from_z_polynomial(&coeffs, s)
}

type Memo =RwLock<HashMap<(DiagramType, u32), Arc<TypeGFEntry>>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Seed series and closure for one type, with `sub` resolving the smaller
/// types it depends on.
fn compute(ty: &DiagramType, s: u32, sub: &mut dyn FnMut(&DiagramType) -> LogExpr) -> TypeGFEntry {
    assert!(ty.is_valid(), "invalid type {ty}");
    let si = s as i64;
    let mut a = LogExpr::zero(s);
    if ty.gaps.is_empty() && ty.nonterminals.is_empty() {
        a = a + monomial(ty.delta, s);
    }
    for d in dedup_sorted(&ty.nonterminals) {
        let smaller = DiagramType::new(ty.delta, ty.gaps.clone(), remove_one(&ty.nonterminals, &d));
        let f = sub(&smaller);
        let lower = f.integrate_n(d - 1);
        let upper = lower.antiderivative();
        a = a + (&LogExpr::z(s) * &lower).scale(&rational::int(si)) - upper.scale(&rational::int(si * d as i64 + 1));
    }
    let mut decomps = BTreeSet::new();
    for head in dedup_sorted(&ty.gaps) {
        let rest = remove_one(&ty.gaps, &head);
        for (g2, g1) in splits(&rest) {
            for (d2, d1) in splits(&ty.nonterminals) {
                if head.1 == 1 && !(g2.is_empty() && d2.is_empty()) {
                    continue;
                }
                decomps.insert((head, g1.clone(), g2.clone(), d1, d2));
            }
        }
    }
    for ((delta2, gamma), g1, g2, d1, d2) in decomps {
        let m = gamma + delta2 - 1
            + g2.iter().map(|&(d, g)| d + g - 1).sum::<u32>()
            + d2.iter().map(|&d| d - 1).sum::<u32>();
        let inner = sub(&DiagramType::new(delta2, g2, d2));
        let f_m = inner.coefficient(m as usize) * BigRational::from_integer(rational::factorial(m as u64));
        if f_m == BigRational::from_integer(0.into()) {
            continue;
        }
        let bare = g1.is_empty() && d1.is_empty();
        let mut outer = sub(&DiagramType::new(ty.delta, g1, d1));
        if bare {
            // The left part keeps the root and at least one component
            // under it, so the lone decoration-Δ chord is not allowed.
            outer = outer - monomial(ty.delta, s);
        }
        let factor = f_m * rational::int(si * m as i64 - 1);
        a = a + outer.integrate_n(m).scale(&factor);
    }
    let f = a.root_insertion_closure();
    TypeGFEntry { ty: ty.clone(), s, f, base_a: Some(a) }
}

/// `F_{Δ,G,D}` for insertion parameter `s`, memoised on `(type, s)`.
pub fn f_of_type(ty: &DiagramType, s: u32) -> Arc<TypeGFEntry> {
    let key = (ty.clone(), s);
    if let Some(hit) = memo().read().expect("memo lock").get(&key) {
        return hit.clone();
    }
    let entry = Arc::new(compute(ty, s, &mut |sub| f_of_type(sub, s).f.clone()));
    memo().write().expect("memo lock").entry(key).or_insert(entry).clone()
}

/// Same as [`f_of_type`] but recomputes every dependency from scratch.
pub fn f_of_type_uncached(ty: &DiagramType, s: u32) -> TypeGFEntry {
    compute(ty, s, &mut |sub| f_of_type_uncached(sub, s).f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn ty(delta: u32, gaps: &[(u32, u32)], nts: &[u32]) -> DiagramType {
        DiagramType::new(delta, gaps.to_vec(), nts.to_vec())
    }

    #[test]
    fn type_lists() {
        assert_eq!(enumerate_types(0), vec![ty(1, &[], &[])]);
        assert_eq!(
            enumerate_types(1),
            vec![ty(1, &[], &[]), ty(1, &[], &[2]), ty(1, &[(1, 1)], &[]), ty(2, &[], &[])]
        );
        let k2 = enumerate_types(2);
        assert_eq!(k2.len(), 13);
        assert_eq!(k2.iter().filter(|t| t.t_value() == 2).count(), 9);
        assert!(k2.windows(2).all(|w| w[0].t_value() <= w[1].t_value()));
    }

    #[test]
    fn t_values() {
        assert_eq!(t_value(&ty(1, &[], &[])), 0);
        assert_eq!(t_value(&ty(1, &[(1, 1)], &[])), 1);
        assert_eq!(t_value(&ty(2, &[(1, 2), (2, 1)], &[3])), 7);
    }

    #[test]
    fn simplest_types() {
        for s in 1..=3 {
            let f = f_of_type(&ty(1, &[], &[]), s);
            assert_eq!(f.f, LogExpr::one(s) - LogExpr::term(s, 1, 0, int(1)));
        }
        let s2 = LogExpr::term(2, 1, 1, frac(1, 2)) + LogExpr::z(2);
        assert_eq!(f_of_type(&ty(1, &[(1, 1)], &[]), 2).f, s2);
        assert_eq!(f_of_type(&ty(1, &[], &[2]), 2).f, s2);
    }

    #[test]
    fn memo_is_transparent() {
        let t = ty(2, &[(1, 1)], &[2]);
        for s in 1..=3 {
            assert_eq!(f_of_type(&t, s).f, f_of_type_uncached(&t, s).f);
        }
    }
}
