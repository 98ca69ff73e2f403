//! Next-to^k leading-log expansions `H_k(z)`, the truncated Green function
//! `G(x, L)` and the series `P(x)`.
//!
//! Closed forms are assembled from the type generating functions:
//!
//! `H_k(z) = κ - Σ_{t(type) ≤ k} prefactor(type) · (∂^k F_type)(-a_{1,0} z)`
//!
//! where the argument substitution turns `w = 1 - s y` into
//! `u = 1 + s a_{1,0} z`. The diagram sums give the same series directly and
//! serve as the oracle.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apoly::{AMonomial, APolynomial, AValues, AlgebraError, MonomialKey};
use crate::diagrams::enumerate::{catalog, for_each_composition};
use crate::diagrams::{a_monomial_of, weight_of, DiagramType};
use crate::exec::Strategy;
use crate::rational;
use crate::symexpr::{basis_latex, Basis, LogExpr};
use crate::typegf::{enumerate_types, f_of_type};

#[derive(Debug, Error, PartialEq)]
pub enum ExpansionError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("1 + s a_{{1,0}} z = {0} is not positive")]
    DomainError(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HkTerm {
    pub prefactor: AMonomial,
    #[serde(rename = "type")]
    pub ty: DiagramType,
    #[serde(rename = "F")]
    pub f: LogExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HkClosedForm {
    pub k: u32,
    pub s: u32,
    pub kappa: APolynomial,
    pub terms: Vec<HkTerm>,
}

/// `a_{1,0}^{k-Δ} a_{Δ,k-t} Π_D a_{d,0}/a_{1,0}^d Π_G a_{d,g}/a_{1,0}^d`.
pub fn prefactor(ty: &DiagramType, k: u32) -> AMonomial {
    let t = ty.t_value();
    assert!(t <= k, "type {ty} has t-value above {k}");
    let mut key = MonomialKey::var(1, 0).pow(k as i32 - ty.delta as i32).mul(&MonomialKey::var(ty.delta, k - t));
    for &d in &ty.nonterminals {
        key = key.mul(&MonomialKey::var(d, 0)).mul(&MonomialKey::var(1, 0).pow(-(d as i32)));
    }
    for &(d, g) in &ty.gaps {
        key = key.mul(&MonomialKey::var(d, g)).mul(&MonomialKey::var(1, 0).pow(-(d as i32)));
    }
    AMonomial { coeff: BigRational::one(), key }
}

/// Map from basis `u^{m/s} ln^b u` to its coefficient in the `a_{i,j}`.
pub type NormalForm = BTreeMap<Basis, APolynomial>;

pub fn hk_closed_form(k: u32, s: u32) -> HkClosedForm {
    let types = enumerate_types(k);
    let entries = Strategy::default().map(types, |ty| {
        let f = f_of_type(&ty, s).f.clone();
        (prefactor(&ty, k), ty, f)
    });
    let mut kappa = APolynomial::zero();
    let mut terms = Vec::new();
    for (pre, ty, f) in entries {
        let at0 = f.differentiate_n(k).eval_origin();
        kappa.add_monomial(&pre.scale(&at0));
        terms.push(HkTerm { prefactor: pre, ty, f });
    }
    HkClosedForm { k, s, kappa, terms }
}

impl HkClosedForm {
    /// All terms merged by basis function of `u`.
    pub fn normal_form(&self) -> NormalForm {
        let mut out: NormalForm = BTreeMap::new();
        let mut add = |key: Basis, p: APolynomial| {
            let slot = out.entry(key).or_default();
            *slot += p;
            if slot.is_zero() {
                out.remove(&key);
            }
        };
        add((0, 0), self.kappa.clone());
        for term in &self.terms {
            for (&key, c) in self.derivative(term).terms() {
                add(key, APolynomial::from(term.prefactor.scale(&-c)));
            }
        }
        out
    }

    fn derivative(&self, term: &HkTerm) -> LogExpr {
        term.f.differentiate_n(self.k)
    }

    /// Taylor coefficients of `z^1 .. z^n`.
    pub fn series(&self, n: usize) -> Vec<APolynomial> {
        let mut out = vec![APolynomial::zero(); n];
        for term in &self.terms {
            let coeffs = self.derivative(term).coefficients(n);
            for (i, slot) in out.iter_mut().enumerate() {
                let deg = i + 1;
                // (-a_{1,0} z)^deg
                let sign = if deg % 2 == 0 { BigRational::one() } else { -BigRational::one() };
                let m = term.prefactor.scale(&(-&coeffs[deg] * sign));
                let m = &m * &AMonomial::a_pow(1, 0, deg as i32);
                slot.add_monomial(&m);
            }
        }
        out
    }

    /// `H_k(z)` with every symbol valued: `κ - G(-a_{1,0} z)` where `G` is a
    /// single closed form in the original variable.
    pub fn specialise(&self, values: &AValues) -> Result<(BigRational, LogExpr, BigRational), ExpansionError> {
        let kappa = self.kappa.eval(values)?;
        let mut g = LogExpr::zero(self.s);
        for term in &self.terms {
            let lambda = APolynomial::from(term.prefactor.clone()).eval(values)?;
            if !lambda.is_zero() {
                g = g + self.derivative(term).scale(&lambda);
            }
        }
        let a10 = values.get(1, 0).cloned().ok_or(AlgebraError::UnassignedSymbol(1, 0))?;
        Ok((kappa, g, a10))
    }

    /// Floating-point value at `z`.
    pub fn evaluate(&self, values: &AValues, z: f64) -> Result<f64, ExpansionError> {
        let a10 = rational::to_f64(values.get(1, 0).ok_or(AlgebraError::UnassignedSymbol(1, 0))?);
        let u = 1.0 + self.s as f64 * a10 * z;
        if u <= 0.0 {
            return Err(ExpansionError::DomainError(u));
        }
        let lu = u.ln();
        let mut total = 0.0;
        for (&(m, b), c) in &self.normal_form() {
            let cv = rational::to_f64(&c.eval(values)?);
            total += cv * u.powf(m as f64 / self.s as f64) * lu.powi(b as i32);
        }
        Ok(total)
    }

    pub fn base_latex(&self) -> String {
        if self.s == 1 {
            "1+a_{1,0}z".into()
        } else {
            format!("1+{}a_{{1,0}}z", self.s)
        }
    }

    pub fn to_latex(&self) -> String {
        render_normal_form_latex(&self.normal_form(), self.s, &self.base_latex())
    }

    /// Plain-text rendering in terms of `u = 1 + s a_{1,0} z`.
    pub fn to_text(&self) -> String {
        let nf = self.normal_form();
        if nf.is_empty() {
            return format!("H_{}(z) = 0", self.k);
        }
        let parts: Vec<String> = nf
            .iter()
            .rev()
            .map(|(&(m, b), c)| {
                let mut basis = String::new();
                if m != 0 {
                    let r = BigRational::new(BigInt::from(m), BigInt::from(self.s));
                    basis.push_str(&format!(" * u^({})", rational::to_string(&r)));
                }
                if b > 0 {
                    basis.push_str(&format!(" * ln(u)^{b}"));
                }
                format!("({c}){basis}")
            })
            .collect();
        format!("H_{}(z) = {}\n  where u = 1 + {}*a10*z", self.k, parts.join("\n    + "), self.s)
    }
}

/// LaTeX for `Σ c_{m,b} · base^{m/s} ln^b(base)`, highest basis first.
pub fn render_normal_form_latex(nf: &NormalForm, s: u32, base: &str) -> String {
    if nf.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (&(m, b), c)) in nf.iter().rev().enumerate() {
        let factor = basis_latex(m, b, s, base);
        let single = c.len() == 1;
        let (neg, body) = if single {
            let mono = &c.monomials()[0];
            let neg = mono.coeff.is_negative();
            let abs = APolynomial::from(AMonomial { coeff: mono.coeff.abs(), key: mono.key.clone() });
            let text = abs.to_latex();
            let text = if text == "1" && !factor.is_empty() { String::new() } else { text };
            (neg, text)
        } else {
            (false, format!("\\left({}\\right)", c.to_latex()))
        };
        if neg {
            out.push('-');
        } else if idx > 0 {
            out.push('+');
        }
        out.push_str(&body);
        out.push_str(&factor);
    }
    out
}

pub fn hk_series(k: u32, s: u32, n: usize) -> Vec<APolynomial> {
    hk_closed_form(k, s).series(n)
}

type Tally = HashMap<MonomialKey, BigInt>;

fn merge_tallies(mut a: Tally, b: Tally) -> Tally {
    for (k, v) in b {
        *a.entry(k).or_insert_with(BigInt::zero) += v;
    }
    a
}

fn tally_to_poly(t: Tally, scale: &BigRational) -> APolynomial {
    let mut p = APolynomial::zero();
    for (k, v) in t {
        p.add_term(k, BigRational::from_integer(v) * scale);
    }
    p
}

/// `[z^1..z^n] H_k` summed straight over decorated diagrams.
pub fn hk_bruteforce(k: u32, s: u32, n: usize) -> Vec<APolynomial> {
    hk_bruteforce_with(k, s, n, Strategy::default())
}

pub fn hk_bruteforce_with(k: u32, s: u32, n: usize, strategy: Strategy) -> Vec<APolynomial> {
    (1..=n)
        .map(|deg| {
            let size = deg as u32 + k;
            let mut tally = Tally::new();
            for chords in 1..=size as usize {
                // Only diagrams with t1 >= size - k contribute, and t1 <= |C|.
                if chords + (k as usize) < size as usize {
                    continue;
                }
                let cat = catalog(chords);
                let part = strategy.map_reduce(
                    (0..cat.len()).collect(),
                    Tally::new,
                    |acc, i| {
                        let shape = cat.get(i);
                        let t1 = shape.t1();
                        if t1 + (k as usize) < size as usize {
                            return;
                        }
                        let omega = shape.omega();
                        let terminals = shape.terminals();
                        for_each_composition(size, chords, |decos| {
                            let w = weight_of(decos, &omega, s);
                            if w.is_zero() {
                                return;
                            }
                            let delta = decos[t1 - 1];
                            let j = (t1 + k as usize - size as usize) as u32;
                            let key = a_monomial_of(decos, &terminals).key.mul(&MonomialKey::var(delta, j));
                            *acc.entry(key).or_insert_with(BigInt::zero) += w;
                        });
                    },
                    merge_tallies,
                );
                tally = merge_tallies(tally, part);
            }
            // -(-1)^deg / deg!
            let mut scale = BigRational::new(BigInt::one(), rational::factorial(deg as u64));
            if deg % 2 == 0 {
                scale = -scale;
            }
            tally_to_poly(tally, &scale)
        })
        .collect()
}

/// Coefficients `g[i][j]` of `L^i x^j` in `G(x, L)`, `0 <= i <= j <= N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateSeries {
    pub order: usize,
    pub g: Vec<Vec<APolynomial>>,
}

impl BivariateSeries {
    pub fn get(&self, i: usize, j: usize) -> APolynomial {
        self.g.get(i).and_then(|row| row.get(j)).cloned().unwrap_or_default()
    }

    /// `[z^n] H_k` read off the `k`-th diagonal.
    pub fn diagonal(&self, k: usize) -> Vec<APolynomial> {
        (1..=self.order.saturating_sub(k)).map(|n| self.get(n, n + k)).collect()
    }

    pub fn is_triangular(&self) -> bool {
        self.g.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, c)| j >= i || c.is_zero()))
    }
}

/// Per size `j` and log power `i`: Σ w A a_{Δ,t1-i} over diagrams of size `j`.
fn green_tallies(s: u32, order: usize, strategy: Strategy) -> Vec<Vec<Tally>> {
    let mut out = vec![vec![Tally::new(); order + 1]; order + 1];
    for size in 1..=order as u32 {
        for chords in 1..=size as usize {
            let cat = catalog(chords);
            let part = strategy.map_reduce(
                (0..cat.len()).collect(),
                || vec![Tally::new(); chords + 1],
                |acc, idx| {
                    let shape = cat.get(idx);
                    let t1 = shape.t1();
                    let omega = shape.omega();
                    let terminals = shape.terminals();
                    for_each_composition(size, chords, |decos| {
                        let w = weight_of(decos, &omega, s);
                        if w.is_zero() {
                            return;
                        }
                        let a = a_monomial_of(decos, &terminals).key;
                        let delta = decos[t1 - 1];
                        for i in 1..=t1 {
                            let key = a.mul(&MonomialKey::var(delta, (t1 - i) as u32));
                            *acc[i].entry(key).or_insert_with(BigInt::zero) += &w;
                        }
                    });
                },
                |a, b| a.into_iter().zip(b).map(|(x, y)| merge_tallies(x, y)).collect(),
            );
            for (i, t) in part.into_iter().enumerate() {
                let slot = std::mem::take(&mut out[i][size as usize]);
                out[i][size as usize] = merge_tallies(slot, t);
            }
        }
    }
    out
}

/// `G(x, L) = 1 - Σ_C (Σ_{i=1}^{t1} a_{Δ,t1-i} (-L)^i / i!) w(C) A(C) x^{‖C‖}`.
pub fn green_series(s: u32, order: usize) -> BivariateSeries {
    let tallies = green_tallies(s, order, Strategy::default());
    let mut g = vec![vec![APolynomial::zero(); order + 1]; order + 1];
    g[0][0] = APolynomial::one();
    for (i, row) in tallies.into_iter().enumerate().skip(1) {
        // -(-1)^i / i!
        let mut scale = BigRational::new(BigInt::one(), rational::factorial(i as u64));
        if i % 2 == 0 {
            scale = -scale;
        }
        for (j, t) in row.into_iter().enumerate() {
            g[i][j] = tally_to_poly(t, &scale);
        }
    }
    BivariateSeries { order, g }
}

/// `P(x) = Σ_C (a_{Δ,t1-2} - a_{Δ,t1-1}) w(C) A(C) x^{‖C‖}`, coefficients of
/// `x^1 .. x^N`, with `a_{·,j} = 0` for negative `j`.
pub fn p_series(s: u32, order: usize) -> Vec<APolynomial> {
    let mut out = vec![APolynomial::zero(); order];
    for size in 1..=order as u32 {
        let mut tally = Tally::new();
        for chords in 1..=size as usize {
            let cat = catalog(chords);
            let part = Strategy::default().map_reduce(
                (0..cat.len()).collect(),
                Tally::new,
                |acc, idx| {
                    let shape = cat.get(idx);
                    let t1 = shape.t1();
                    let omega = shape.omega();
                    let terminals = shape.terminals();
                    for_each_composition(size, chords, |decos| {
                        let w = weight_of(decos, &omega, s);
                        if w.is_zero() {
                            return;
                        }
                        let a = a_monomial_of(decos, &terminals).key;
                        let delta = decos[t1 - 1];
                        if t1 >= 2 {
                            let key = a.mul(&MonomialKey::var(delta, (t1 - 2) as u32));
                            *acc.entry(key).or_insert_with(BigInt::zero) += &w;
                        }
                        let key = a.mul(&MonomialKey::var(delta, (t1 - 1) as u32));
                        *acc.entry(key).or_insert_with(BigInt::zero) -= &w;
                    });
                },
                merge_tallies,
            );
            tally = merge_tallies(tally, part);
        }
        out[size as usize - 1] = tally_to_poly(tally, &BigRational::one());
    }
    out
}

/// `γ_1 + 2 γ_2` read off a Green-function table (`G = 1 - Σ γ_i L^i`).
pub fn p_from_green(green: &BivariateSeries) -> Vec<APolynomial> {
    (1..=green.order).map(|j| -(&green.get(1, j) + &green.get(2, j).scale(&rational::int(2)))).collect()
}

/// Checks that every monomial of `[z^n] H_k` has loop weight `n + k` and
/// log deficit `k`, uses only `a_{i,j}` with `i <= k+1`, `j <= k`, and
/// carries no negative power.
pub fn check_hk_coefficient(k: u32, n: usize, c: &APolynomial) -> Result<(), String> {
    for (key, _) in c.terms() {
        if key.loop_weight() != n as i64 + k as i64 {
            return Err(format!("loop weight of {key} is not {}", n as u32 + k));
        }
        if key.log_deficit() != k as i64 {
            return Err(format!("log deficit of {key} is not {k}"));
        }
        if key.min_power() < 0 {
            return Err(format!("negative power in {key}"));
        }
        if key.factors().iter().any(|&((i, j), _)| i > k + 1 || j > k) {
            return Err(format!("{key} uses a symbol outside a_{{i<={},j<={k}}}", k + 1));
        }
    }
    Ok(())
}

/// Rewrites a polynomial in `z` (coefficients in the `a_{i,j}`) into the
/// `u`-basis, `z = (u - 1) / (s a_{1,0})`.
pub fn z_poly_to_normal_form(coeffs: &[APolynomial], s: u32) -> NormalForm {
    let mut out: NormalForm = BTreeMap::new();
    for (deg, c) in coeffs.iter().enumerate() {
        let scale = AMonomial {
            coeff: BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(s), deg)),
            key: MonomialKey::var(1, 0).pow(-(deg as i32)),
        };
        for j in 0..=deg {
            let mut b = BigRational::from_integer(crate::diagrams::binomial(deg as i64, j as u32));
            if (deg - j) % 2 == 1 {
                b = -b;
            }
            let p = c.mul_monomial(&scale.scale(&b));
            let slot = out.entry((j as i64 * s as i64, 0)).or_default();
            *slot += p;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Adds two normal forms.
pub fn add_normal_forms(a: &NormalForm, b: &NormalForm) -> NormalForm {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(*k).or_default() += v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}
