//! Closed forms `Σ c · w^{m/s} · ln(w)^b` with `w = 1 - s z`.
//!
//! Exponents are stored as numerators over the fixed denominator `s`, so
//! integer powers of `w` sit at multiples of `s`. The basis functions are
//! linearly independent; equality of normalised term maps is equality of
//! functions.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymError {
    #[error("closed forms over different s ({0} and {1})")]
    MismatchedS(u32, u32),
    #[error("s must be positive")]
    ZeroS,
    #[error("1 - s z = {0} is not positive")]
    DomainError(f64),
    #[error("malformed closed-form JSON: {0}")]
    BadJson(String),
}

/// `(m, b)`: the basis function `w^{m/s} ln(w)^b`.
pub type Basis = (i64, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogExpr {
    s: u32,
    terms: BTreeMap<Basis, BigRational>,
}

impl LogExpr {
    pub fn zero(s: u32) -> Self {
        assert!(s > 0, "s must be positive");
        LogExpr { s, terms: BTreeMap::new() }
    }

    pub fn constant(s: u32, c: BigRational) -> Self {
        Self::term(s, 0, 0, c)
    }

    pub fn one(s: u32) -> Self {
        Self::constant(s, BigRational::one())
    }

    /// `c · w^{m/s} ln(w)^b`.
    pub fn term(s: u32, m: i64, b: u32, c: BigRational) -> Self {
        let mut out = Self::zero(s);
        out.add_term((m, b), c);
        out
    }

    /// The identity function `z = (1 - w)/s`.
    pub fn z(s: u32) -> Self {
        Self::from_z_polynomial(&[BigRational::zero(), BigRational::one()], s)
    }

    /// Rewrites `Σ coeffs[k] z^k` with `z = (1 - w)/s`.
    pub fn from_z_polynomial(coeffs: &[BigRational], s: u32) -> Self {
        let mut out = Self::zero(s);
        let s_big = BigInt::from(s);
        for (k, ck) in coeffs.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let scale = ck / BigRational::from_integer(num_traits::pow(s_big.clone(), k));
            for j in 0..=k {
                let mut c = &scale * BigRational::from_integer(crate::diagrams::binomial(k as i64, j as u32));
                if j % 2 == 1 {
                    c = -c;
                }
                out.add_term((j as i64 * s as i64, 0), c);
            }
        }
        out
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn terms(&self) -> &BTreeMap<Basis, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Basis, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check(&self, other: &LogExpr) -> Result<(), SymError> {
        if self.s == other.s {
            Ok(())
        } else {
            Err(SymError::MismatchedS(self.s, other.s))
        }
    }

    pub fn try_add(&self, other: &LogExpr) -> Result<LogExpr, SymError> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &LogExpr) -> Result<LogExpr, SymError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &LogExpr) -> Result<LogExpr, SymError> {
        self.check(other)?;
        let mut out = LogExpr::zero(self.s);
        for (&(m1, b1), c1) in &self.terms {
            for (&(m2, b2), c2) in &other.terms {
                out.add_term((m1 + m2, b1 + b2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> LogExpr {
        let mut out = LogExpr::zero(self.s);
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }

    /// Multiplies by `w^{dm/s}`.
    pub fn shift_power(&self, dm: i64) -> LogExpr {
        LogExpr { s: self.s, terms: self.terms.iter().map(|(&(m, b), c)| ((m + dm, b), c.clone())).collect() }
    }

    /// `d/dz`, using `dw/dz = -s`.
    pub fn differentiate(&self) -> LogExpr {
        let s = self.s as i64;
        let mut out = LogExpr::zero(self.s);
        for (&(m, b), c) in &self.terms {
            out.add_term((m - s, b), c * rational::int(-m));
            if b > 0 {
                out.add_term((m - s, b - 1), c * rational::int(-s * b as i64));
            }
        }
        out
    }

    pub fn differentiate_n(&self, n: u32) -> LogExpr {
        (0..n).fold(self.clone(), |f, _| f.differentiate())
    }

    /// Value at `z = 0`.
    pub fn eval_origin(&self) -> BigRational {
        self.terms.iter().filter(|((_, b), _)| *b == 0).map(|(_, c)| c.clone()).sum()
    }

    /// An antiderivative of the single basis function, not normalised at 0.
    fn primitive_of_basis(s: u32, m: i64, b: u32, out: &mut LogExpr, c: BigRational) {
        let si = s as i64;
        if c.is_zero() {
            return;
        }
        if m == -si {
            out.add_term((0, b + 1), c / rational::int(-(si * (b as i64 + 1))));
            return;
        }
        let q = m + si;
        out.add_term((q, b), -&c / rational::int(q));
        if b > 0 {
            let next = -&c * rational::int(b as i64 * si) / rational::int(q);
            Self::primitive_of_basis(s, m, b - 1, out, next);
        }
    }

    /// The antiderivative vanishing at `z = 0`.
    pub fn antiderivative(&self) -> LogExpr {
        let mut out = LogExpr::zero(self.s);
        for (&(m, b), c) in &self.terms {
            Self::primitive_of_basis(self.s, m, b, &mut out, c.clone());
        }
        let at0 = out.eval_origin();
        out.add_term((0, 0), -at0);
        out
    }

    /// `n`-fold antiderivative, each step vanishing at the origin.
    pub fn integrate_n(&self, n: u32) -> LogExpr {
        (0..n).fold(self.clone(), |f, _| f.antiderivative())
    }

    /// `w^{1/s} ∫_0^z w(t)^{-(s+1)/s} A'(t) dt`: the effect of inserting any
    /// number of root chords above the diagrams counted by `A`.
    pub fn root_insertion_closure(&self) -> LogExpr {
        let s = self.s as i64;
        self.differentiate().shift_power(-(s + 1)).antiderivative().shift_power(1)
    }

    /// `[z^n]`, exact.
    pub fn coefficient(&self, n: usize) -> BigRational {
        let mut out = BigRational::zero();
        self.for_each_coefficient(n, |k, c| {
            if k == n {
                out = c.to_rational();
            }
        });
        out
    }

    /// `[z^0] .. [z^n]`, exact.
    pub fn coefficients(&self, n: usize) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(n + 1);
        self.for_each_coefficient(n, |_, c| out.push(c.to_rational()));
        out
    }

    /// Streams `[z^k]` for `k = 0..=n` as unreduced ratios.
    ///
    /// Each basis group `w^{m/s} ln^{≤b}` is differentiated step by step on
    /// an integer state vector; the value at the origin of the `k`-th
    /// derivative divided by `k!` is the coefficient. No gcd is taken, so
    /// this stays cheap for `n` in the tens of thousands.
    pub fn for_each_coefficient(&self, n: usize, mut f: impl FnMut(usize, &RawCoefficient)) {
        let s = self.s as i64;
        let denom = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        // m -> integer coefficients indexed by log power.
        let mut groups: BTreeMap<i64, Vec<BigInt>> = BTreeMap::new();
        for (&(m, b), c) in &self.terms {
            let v = groups.entry(m).or_default();
            if v.len() <= b as usize {
                v.resize(b as usize + 1, BigInt::zero());
            }
            v[b as usize] = c.numer() * (&denom / c.denom());
        }
        let mut states: Vec<(i64, Vec<BigInt>)> = groups.into_iter().collect();
        let mut fact = BigInt::one();
        for k in 0..=n {
            if k > 0 {
                fact *= k;
            }
            let numer: BigInt = states.iter().map(|(_, v)| v[0].clone()).sum();
            f(k, &RawCoefficient { numer, denom: &denom * &fact });
            if k == n {
                break;
            }
            for (m, v) in states.iter_mut() {
                // d/dz [w^{M/s} ln^j] = -M w^{(M-s)/s} ln^j - s j w^{(M-s)/s} ln^{j-1}
                let big_m = *m;
                for j in 0..v.len() {
                    let mut next = &v[j] * -big_m;
                    if j + 1 < v.len() {
                        next -= &v[j + 1] * (s * (j as i64 + 1));
                    }
                    v[j] = next;
                }
                *m -= s;
            }
        }
    }

    /// Floating evaluation at real `z` with `1 - s z > 0`.
    pub fn eval_f64(&self, z: f64) -> Result<f64, SymError> {
        let w = 1.0 - self.s as f64 * z;
        if w <= 0.0 {
            return Err(SymError::DomainError(w));
        }
        let lw = w.ln();
        Ok(self
            .terms
            .iter()
            .map(|(&(m, b), c)| rational::to_f64(c) * w.powf(m as f64 / self.s as f64) * lw.powi(b as i32))
            .sum())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("closed form serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, SymError> {
        serde_json::from_str(text).map_err(|e| SymError::BadJson(e.to_string()))
    }

    /// LaTeX with the base written out, e.g. `base = "1-2z"`.
    pub fn to_latex_with_base(&self, base: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (&(m, b), c)) in self.terms.iter().rev().enumerate() {
            let factor = basis_latex(m, b, self.s, base);
            let neg = c.is_negative();
            if idx > 0 || neg {
                out.push(if neg { '-' } else { '+' });
            }
            let abs = c.abs();
            let coeff = if abs.is_one() && !factor.is_empty() {
                String::new()
            } else if abs.denom().is_one() {
                abs.numer().to_string()
            } else {
                format!("\\frac{{{}}}{{{}}}", abs.numer(), abs.denom())
            };
            out.push_str(&coeff);
            out.push_str(&factor);
        }
        out
    }

    pub fn to_latex(&self) -> String {
        self.to_latex_with_base(&format!("1-{}z", self.s))
    }
}

/// `base^{m/s} \ln^b(base)` in LaTeX; empty for the constant basis element.
pub fn basis_latex(m: i64, b: u32, s: u32, base: &str) -> String {
    let r = BigRational::new(BigInt::from(m), BigInt::from(s));
    let mut out = String::new();
    if !r.is_zero() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        if r == half {
            out.push_str(&format!("\\sqrt{{{base}}}"));
        } else if r.is_one() {
            out.push_str(&format!("({base})"));
        } else if r.denom().is_one() {
            out.push_str(&format!("({base})^{{{}}}", r.numer()));
        } else {
            out.push_str(&format!("({base})^{{{}/{}}}", r.numer(), r.denom()));
        }
    }
    match b {
        0 => {}
        1 => out.push_str(&format!("\\ln({base})")),
        _ => out.push_str(&format!("\\ln^{{{b}}}({base})")),
    }
    out
}

/// `numer / denom`, not reduced.
#[derive(Debug, Clone)]
pub struct RawCoefficient {
    pub numer: BigInt,
    pub denom: BigInt,
}

impl RawCoefficient {
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numer.clone(), self.denom.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let s = self.numer.signum() * self.denom.signum();
        s.to_i32().unwrap_or(0)
    }

    pub fn to_f64(&self) -> f64 {
        rational::ratio_to_f64(&self.numer, &self.denom)
    }

    pub fn ln_abs(&self) -> f64 {
        rational::ratio_ln_abs(&self.numer, &self.denom)
    }
}

impl Add for &LogExpr {
    type Output = LogExpr;
    /// Panics when the two operands use different `s`.
    fn add(self, rhs: &LogExpr) -> LogExpr {
        self.try_add(rhs).expect("closed forms over the same s")
    }
}

impl Add for LogExpr {
    type Output = LogExpr;
    fn add(self, rhs: LogExpr) -> LogExpr {
        &self + &rhs
    }
}

impl Sub for &LogExpr {
    type Output = LogExpr;
    fn sub(self, rhs: &LogExpr) -> LogExpr {
        self.try_sub(rhs).expect("closed forms over the same s")
    }
}

impl Sub for LogExpr {
    type Output = LogExpr;
    fn sub(self, rhs: LogExpr) -> LogExpr {
        &self - &rhs
    }
}

impl Mul for &LogExpr {
    type Output = LogExpr;
    fn mul(self, rhs: &LogExpr) -> LogExpr {
        self.try_mul(rhs).expect("closed forms over the same s")
    }
}

impl Mul for LogExpr {
    type Output = LogExpr;
    fn mul(self, rhs: LogExpr) -> LogExpr {
        &self * &rhs
    }
}

impl Neg for &LogExpr {
    type Output = LogExpr;
    fn neg(self) -> LogExpr {
        LogExpr { s: self.s, terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

impl Neg for LogExpr {
    type Output = LogExpr;
    fn neg(self) -> LogExpr {
        -&self
    }
}

impl fmt::Display for LogExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(&(m, b), c)| {
                let mut t = rational::to_string(c);
                if m != 0 {
                    let r = BigRational::new(BigInt::from(m), BigInt::from(self.s));
                    t.push_str(&format!("*w^({})", rational::to_string(&r)));
                }
                if b > 0 {
                    t.push_str(&format!("*ln(w)^{b}"));
                }
                t
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    m: i64,
    b: u32,
    #[serde(with = "rational")]
    c: BigRational,
}

#[derive(Serialize, Deserialize)]
struct LogExprJson {
    s: u32,
    terms: Vec<TermJson>,
}

impl Serialize for LogExpr {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        LogExprJson {
            s: self.s,
            terms: self.terms.iter().map(|(&(m, b), c)| TermJson { m, b, c: c.clone() }).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LogExpr {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = LogExprJson::deserialize(de)?;
        if raw.s == 0 {
            return Err(serde::de::Error::custom(SymError::ZeroS));
        }
        let mut out = LogExpr::zero(raw.s);
        for t in raw.terms {
            out.add_term((t.m, t.b), t.c);
        }
        Ok(out)
    }
}
