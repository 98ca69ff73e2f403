//! Laurent polynomials in the primitive-expansion symbols `a_{i,j}`.
//!
//! `a_{i,j}` is the coefficient of `ρ^{j-1}` in the regularized `i`-loop
//! primitive. Only `a_{1,0}` ever carries a negative power, and only in
//! intermediate closed-form prefactors.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational;

/// Symbol index `(i, j)`: loop order `i >= 1`, expansion order `j >= 0`.
pub type AIndex = (u32, u32);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("no value assigned to a_{{{0},{1}}}")]
    UnassignedSymbol(u32, u32),
    #[error("a_{{{0},{1}}} is zero but appears with a negative power")]
    DivisionByZero(u32, u32),
    #[error("malformed a-values file: {0}")]
    BadValues(String),
}

/// Sorted, zero-free list of `(index, power)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MonomialKey(Vec<(AIndex, i32)>);

impl MonomialKey {
    pub fn one() -> Self {
        MonomialKey(Vec::new())
    }

    pub fn var(i: u32, j: u32) -> Self {
        MonomialKey(vec![((i, j), 1)])
    }

    pub fn factors(&self) -> &[(AIndex, i32)] {
        &self.0
    }

    pub fn power_of(&self, idx: AIndex) -> i32 {
        self.0.iter().find(|(k, _)| *k == idx).map_or(0, |(_, p)| *p)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn from_map(map: BTreeMap<AIndex, i32>) -> Self {
        MonomialKey(map.into_iter().filter(|(_, p)| *p != 0).collect())
    }

    pub fn mul(&self, other: &MonomialKey) -> MonomialKey {
        let mut map: BTreeMap<AIndex, i32> = self.0.iter().copied().collect();
        for &(idx, p) in &other.0 {
            *map.entry(idx).or_insert(0) += p;
        }
        MonomialKey::from_map(map)
    }

    pub fn pow(&self, e: i32) -> MonomialKey {
        MonomialKey(self.0.iter().filter(|_| e != 0).map(|&(idx, p)| (idx, p * e)).collect())
    }

    /// `Σ i·p` over factors.
    pub fn loop_weight(&self) -> i64 {
        self.0.iter().map(|&((i, _), p)| i as i64 * p as i64).sum()
    }

    /// `Σ (i - 1 + j)·p` over factors: how many powers of `L` each symbol
    /// gives up relative to its loop order.
    pub fn log_deficit(&self) -> i64 {
        self.0.iter().map(|&((i, j), p)| (i as i64 - 1 + j as i64) * p as i64).sum()
    }

    pub fn min_power(&self) -> i32 {
        self.0.iter().map(|&(_, p)| p).min().unwrap_or(0)
    }
}

/// A single coefficient times a monomial in the `a_{i,j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AMonomial {
    pub coeff: BigRational,
    pub key: MonomialKey,
}

impl AMonomial {
    pub fn one() -> Self {
        AMonomial { coeff: BigRational::one(), key: MonomialKey::one() }
    }

    pub fn a(i: u32, j: u32) -> Self {
        AMonomial { coeff: BigRational::one(), key: MonomialKey::var(i, j) }
    }

    pub fn constant(c: BigRational) -> Self {
        AMonomial { coeff: c, key: MonomialKey::one() }
    }

    /// `a_{i,j}^p`; `p` may be negative.
    pub fn a_pow(i: u32, j: u32, p: i32) -> Self {
        AMonomial { coeff: BigRational::one(), key: MonomialKey::var(i, j).pow(p) }
    }

    pub fn factors(&self) -> BTreeMap<AIndex, i32> {
        self.key.0.iter().copied().collect()
    }

    pub fn scale(&self, c: &BigRational) -> AMonomial {
        AMonomial { coeff: &self.coeff * c, key: self.key.clone() }
    }

    pub fn pow(&self, e: u32) -> AMonomial {
        AMonomial { coeff: num_traits::pow(self.coeff.clone(), e as usize), key: self.key.pow(e as i32) }
    }

    pub fn mul_key(&self, key: &MonomialKey) -> AMonomial {
        AMonomial { coeff: self.coeff.clone(), key: self.key.mul(key) }
    }

    /// Panics on a zero coefficient.
    pub fn inverse(&self) -> AMonomial {
        AMonomial { coeff: self.coeff.recip(), key: self.key.pow(-1) }
    }
}

impl Mul for &AMonomial {
    type Output = AMonomial;
    fn mul(self, rhs: &AMonomial) -> AMonomial {
        AMonomial { coeff: &self.coeff * &rhs.coeff, key: self.key.mul(&rhs.key) }
    }
}

impl Mul for AMonomial {
    type Output = AMonomial;
    fn mul(self, rhs: AMonomial) -> AMonomial {
        &self * &rhs
    }
}

/// Normalised sum of monomials: like terms merged, no zero coefficients,
/// canonical (sorted) order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct APolynomial {
    terms: BTreeMap<MonomialKey, BigRational>,
}

impl APolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        APolynomial::from(AMonomial::constant(c))
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn a(i: u32, j: u32) -> Self {
        APolynomial::from(AMonomial::a(i, j))
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

    pub fn terms(&self) -> impl Iterator<Item = (&MonomialKey, &BigRational)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<AMonomial> {
        self.terms.iter().map(|(k, c)| AMonomial { coeff: c.clone(), key: k.clone() }).collect()
    }

    pub fn add_monomial(&mut self, m: &AMonomial) {
        self.add_term(m.key.clone(), m.coeff.clone());
    }

    pub fn add_term(&mut self, key: MonomialKey, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> APolynomial {
        if c.is_zero() {
            return APolynomial::zero();
        }
        APolynomial { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &AMonomial) -> APolynomial {
        let mut out = APolynomial::zero();
        for (k, v) in &self.terms {
            out.add_term(k.mul(&m.key), v * &m.coeff);
        }
        out
    }

    pub fn pow(&self, e: u32) -> APolynomial {
        (0..e).fold(APolynomial::one(), |acc, _| &acc * self)
    }

    /// Constant term (coefficient of the empty monomial).
    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&MonomialKey::one()).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Exact evaluation at rational symbol values.
    pub fn eval(&self, values: &AValues) -> Result<BigRational, AlgebraError> {
        let mut total = BigRational::zero();
        for (key, c) in &self.terms {
            let mut term = c.clone();
            for &((i, j), p) in key.factors() {
                let v = values.get(i, j).ok_or(AlgebraError::UnassignedSymbol(i, j))?;
                if p < 0 && v.is_zero() {
                    return Err(AlgebraError::DivisionByZero(i, j));
                }
                let base = if p < 0 { v.recip() } else { v.clone() };
                term *= num_traits::pow(base, p.unsigned_abs() as usize);
            }
            total += term;
        }
        Ok(total)
    }

    /// Lowest power of `a_{1,0}` appearing (0 if absent everywhere).
    pub fn min_power_of(&self, idx: AIndex) -> i32 {
        self.terms.keys().map(|k| k.power_of(idx)).min().unwrap_or(0)
    }

    pub fn symbols(&self) -> Vec<AIndex> {
        let mut out: Vec<AIndex> = self.terms.keys().flat_map(|k| k.factors().iter().map(|&(idx, _)| idx)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// LaTeX rendering, e.g. `a_{2,0}+a_{1,0}a_{1,1}`.
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (key, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if idx > 0 {
                out.push(if neg { '-' } else { '+' });
            } else if neg {
                out.push('-');
            }
            out.push_str(&latex_monomial(&c.abs(), key));
        }
        out
    }
}

fn latex_symbol(i: u32, j: u32, p: i32) -> String {
    if p == 1 {
        format!("a_{{{i},{j}}}")
    } else {
        format!("a_{{{i},{j}}}^{{{p}}}")
    }
}

/// `|c| · key` with negative powers moved to a denominator.
fn latex_monomial(c: &BigRational, key: &MonomialKey) -> String {
    let num_syms: String =
        key.factors().iter().filter(|(_, p)| *p > 0).map(|&((i, j), p)| latex_symbol(i, j, p)).collect();
    let den_syms: String =
        key.factors().iter().filter(|(_, p)| *p < 0).map(|&((i, j), p)| latex_symbol(i, j, -p)).collect();
    let num_c = c.numer();
    let den_c = c.denom();
    let mut top = String::new();
    if !num_c.is_one() || num_syms.is_empty() {
        top.push_str(&num_c.to_string());
    }
    top.push_str(&num_syms);
    let mut bottom = String::new();
    if !den_c.is_one() {
        bottom.push_str(&den_c.to_string());
    }
    bottom.push_str(&den_syms);
    if bottom.is_empty() {
        top
    } else {
        format!("\\frac{{{top}}}{{{bottom}}}")
    }
}

impl From<AMonomial> for APolynomial {
    fn from(m: AMonomial) -> Self {
        let mut p = APolynomial::zero();
        p.add_term(m.key, m.coeff);
        p
    }
}

impl AddAssign<&APolynomial> for APolynomial {
    fn add_assign(&mut self, rhs: &APolynomial) {
        for (k, v) in &rhs.terms {
            self.add_term(k.clone(), v.clone());
        }
    }
}

impl AddAssign for APolynomial {
    fn add_assign(&mut self, rhs: APolynomial) {
        for (k, v) in rhs.terms {
            self.add_term(k, v);
        }
    }
}

impl Add for &APolynomial {
    type Output = APolynomial;
    fn add(self, rhs: &APolynomial) -> APolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for APolynomial {
    type Output = APolynomial;
    fn add(mut self, rhs: APolynomial) -> APolynomial {
        self += rhs;
        self
    }
}

impl Neg for &APolynomial {
    type Output = APolynomial;
    fn neg(self) -> APolynomial {
        APolynomial { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect() }
    }
}

impl Neg for APolynomial {
    type Output = APolynomial;
    fn neg(self) -> APolynomial {
        -&self
    }
}

impl Sub for &APolynomial {
    type Output = APolynomial;
    fn sub(self, rhs: &APolynomial) -> APolynomial {
        self + &(-rhs)
    }
}

impl Sub for APolynomial {
    type Output = APolynomial;
    fn sub(self, rhs: APolynomial) -> APolynomial {
        &self - &rhs
    }
}

impl Mul for &APolynomial {
    type Output = APolynomial;
    fn mul(self, rhs: &APolynomial) -> APolynomial {
        let mut out = APolynomial::zero();
        for (k1, v1) in &self.terms {
            for (k2, v2) in &rhs.terms {
                out.add_term(k1.mul(k2), v1 * v2);
            }
        }
        out
    }
}

impl Mul for APolynomial {
    type Output = APolynomial;
    fn mul(self, rhs: APolynomial) -> APolynomial {
        &self * &rhs
    }
}

impl fmt::Display for MonomialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&((i, j), p)| if p == 1 { format!("a{i}{j}") } else { format!("a{i}{j}^{p}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl fmt::Display for AMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_one() {
            write!(f, "{}", rational::to_string(&self.coeff))
        } else if self.coeff.is_one() {
            write!(f, "{}", self.key)
        } else if (-&self.coeff).is_one() {
            write!(f, "-{}", self.key)
        } else {
            write!(f, "{}*{}", rational::to_string(&self.coeff), self.key)
        }
    }
}

impl fmt::Display for APolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, m) in self.monomials().iter().rev().enumerate() {
            let text = m.to_string();
            if idx == 0 {
                write!(f, "{text}")?;
            } else if let Some(rest) = text.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {text}")?;
            }
        }
        Ok(())
    }
}

// ---- JSON -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FactorJson {
    i: u32,
    j: u32,
    p: i32,
}

#[derive(Serialize, Deserialize)]
struct MonomialJson {
    #[serde(with = "rational")]
    coeff: BigRational,
    factors: Vec<FactorJson>,
}

impl Serialize for AMonomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        MonomialJson {
            coeff: self.coeff.clone(),
            factors: self.key.0.iter().map(|&((i, j), p)| FactorJson { i, j, p }).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AMonomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = MonomialJson::deserialize(de)?;
        let mut map = BTreeMap::new();
        for f in raw.factors {
            *map.entry((f.i, f.j)).or_insert(0) += f.p;
        }
        Ok(AMonomial { coeff: raw.coeff, key: MonomialKey::from_map(map) })
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    terms: Vec<AMonomial>,
}

impl Serialize for APolynomial {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PolyJson { terms: self.monomials() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for APolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = PolyJson::deserialize(de)?;
        let mut p = APolynomial::zero();
        for m in &raw.terms {
            p.add_monomial(m);
        }
        Ok(p)
    }
}

/// Rational assignment of the `a_{i,j}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AValues {
    values: HashMap<AIndex, BigRational>,
}

#[derive(Serialize, Deserialize)]
struct AValueJson {
    i: u32,
    j: u32,
    v: String,
}

#[derive(Serialize, Deserialize)]
struct AValuesJson {
    a: Vec<AValueJson>,
}

impl AValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, i: u32, j: u32, v: BigRational) -> &mut Self {
        self.values.insert((i, j), v);
        self
    }

    pub fn with(mut self, i: u32, j: u32, v: BigRational) -> Self {
        self.values.insert((i, j), v);
        self
    }

    pub fn get(&self, i: u32, j: u32) -> Option<&BigRational> {
        self.values.get(&(i, j))
    }

    /// Every `a_{i,j}` with `i <= max_i`, `j <= max_j` set to `v`.
    pub fn uniform(max_i: u32, max_j: u32, v: BigRational) -> Self {
        let mut out = AValues::new();
        for i in 1..=max_i {
            for j in 0..=max_j {
                out.set(i, j, v.clone());
            }
        }
        out
    }

    /// Parses `{"a":[{"i":1,"j":0,"v":"1"}, ...]}`.
    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let raw: AValuesJson = serde_json::from_str(text).map_err(|e| AlgebraError::BadValues(e.to_string()))?;
        let mut out = AValues::new();
        for entry in raw.a {
            if entry.i == 0 {
                return Err(AlgebraError::BadValues("loop order i must be >= 1".into()));
            }
            let v = rational::parse(&entry.v).map_err(AlgebraError::BadValues)?;
            out.set(entry.i, entry.j, v);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let mut entries: Vec<_> = self.values.iter().collect();
        entries.sort_by_key(|(k, _)| **k);
        let raw = AValuesJson {
            a: entries.into_iter().map(|(&(i, j), v)| AValueJson { i, j, v: rational::to_string(v) }).collect(),
        };
        serde_json::to_string(&raw).expect("a-values serialise")
    }
}

/// `c · a_{1,0}^e` convenience used when assembling prefactors.
pub fn a10_pow(e: i32) -> AMonomial {
    AMonomial::a_pow(1, 0, e)
}

pub fn int_coeff(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn merging_and_cancellation() {
        let x = APolynomial::a(2, 0) + APolynomial::a(1, 1) * APolynomial::a(1, 0);
        let y = &x - &APolynomial::a(2, 0);
        assert_eq!(y, APolynomial::a(1, 1) * APolynomial::a(1, 0));
        assert!((&x - &x).is_zero());
        let sq = x.pow(2);
        assert_eq!(sq.len(), 3);
    }

    #[test]
    fn negative_powers_cancel() {
        let m = &AMonomial::a_pow(1, 0, -2) * &AMonomial::a_pow(1, 0, 2);
        assert!(m.key.is_one());
    }

    #[test]
    fn evaluation() {
        let p = APolynomial::a(2, 0) + APolynomial::from(AMonomial::a_pow(1, 0, -1).scale(&frac(1, 2)));
        let vals = AValues::new().with(1, 0, frac(1, 4)).with(2, 0, frac(3, 1));
        assert_eq!(p.eval(&vals).unwrap(), frac(5, 1));
        let missing = AValues::new().with(1, 0, frac(1, 1));
        assert_eq!(p.eval(&missing), Err(AlgebraError::UnassignedSymbol(2, 0)));
    }

    #[test]
    fn values_json() {
        let v = AValues::from_json(r#"{"a":[{"i":1,"j":0,"v":"3/2"},{"i":2,"j":1,"v":"-1"}]}"#).unwrap();
        assert_eq!(v.get(1, 0), Some(&frac(3, 2)));
        assert_eq!(AValues::from_json(&v.to_json()).unwrap(), v);
        assert!(AValues::from_json(r#"{"a":[{"i":0,"j":0,"v":"1"}]}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = APolynomial::a(2, 0).scale(&frac(-3, 7)) + APolynomial::from(AMonomial::a_pow(1, 0, -1));
        let text = serde_json::to_string(&p).unwrap();
        let back: APolynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn latex() {
        let p = APolynomial::a(2, 0) + APolynomial::from(AMonomial::a_pow(1, 0, -1).scale(&frac(-1, 2)));
        assert_eq!(p.to_latex(), "a_{2,0}-\\frac{1}{2a_{1,0}}");
    }
}
