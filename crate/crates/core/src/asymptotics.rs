//! Singularity analysis at `z = 1/s`: dominant types, closed-form
//! coefficient estimates and numerical convergence checks against exact
//! coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::apoly::{AValues, AlgebraError};
use crate::diagrams::{binomial, DiagramType};
use crate::expansions::{hk_closed_form, ExpansionError};
use crate::rational;
use crate::symexpr::{LogExpr, RawCoefficient};
use crate::typegf::f_of_type;

#[derive(Debug, Error, PartialEq)]
pub enum AsymptoticsError {
    #[error("no singular term: the function is a polynomial in z")]
    PurelyPolynomial,
    #[error("dominant types are only defined for k >= 1 when s = 1")]
    Undefined,
    #[error("{0} is not a dominant type for s = {1}")]
    NotDominant(DiagramType, u32),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("n_max must be at least 10, got {0}")]
    RangeTooShort(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<ExpansionError> for AsymptoticsError {
    fn from(e: ExpansionError) -> Self {
        match e {
            ExpansionError::Algebra(a) => AsymptoticsError::Algebra(a),
            ExpansionError::DomainError(v) => AsymptoticsError::HypothesisViolated(format!("base {v} not positive")),
        }
    }
}

/// `c (1 - sz)^alpha ln^b(1 - sz)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularTerm {
    #[serde(with = "rational")]
    pub alpha: BigRational,
    pub b: u32,
    #[serde(with = "rational")]
    pub c: BigRational,
}

fn is_nonneg_integer(r: &BigRational) -> bool {
    r.is_integer() && !r.is_negative()
}

/// The basis term that governs `[z^n] F`: smallest exponent among the
/// non-analytic terms, ties broken by the larger log power.
pub fn leading_singular_term(f: &LogExpr) -> Result<SingularTerm, AsymptoticsError> {
    let s = f.s() as i64;
    f.terms()
        .iter()
        .map(|(&(m, b), c)| (BigRational::new(m.into(), s.into()), b, c))
        .filter(|(alpha, b, _)| !(is_nonneg_integer(alpha) && *b == 0))
        .min_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)))
        .map(|(alpha, b, c)| SingularTerm { alpha, b, c: c.clone() })
        .ok_or(AsymptoticsError::PurelyPolynomial)
}

/// `constant · ln(n)^logpower · n^power · base^{n + offset}`, evaluated in
/// log space so that `n` in the tens of thousands stays finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    pub constant: f64,
    pub base: f64,
    pub offset: i64,
    pub power: f64,
    pub logpower: u32,
}

impl AsymptoticEstimate {
    pub fn ln_abs(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.constant.abs().ln()
            + self.logpower as f64 * nf.ln().ln()
            + self.power * nf.ln()
            + (n as i64 + self.offset) as f64 * self.base.abs().ln()
    }

    pub fn sign(&self, n: usize) -> i32 {
        let mut sign = if self.constant < 0.0 { -1 } else { 1 };
        if self.base < 0.0 && (n as i64 + self.offset).rem_euclid(2) == 1 {
            sign = -sign;
        }
        sign
    }

    pub fn value(&self, n: usize) -> f64 {
        self.sign(n) as f64 * self.ln_abs(n).exp()
    }

    /// `exact / estimate` from a signed log magnitude.
    pub fn ratio(&self, n: usize, exact_sign: i32, exact_ln_abs: f64) -> f64 {
        if exact_sign == 0 {
            return 0.0;
        }
        (exact_sign * self.sign(n)) as f64 * (exact_ln_abs - self.ln_abs(n)).exp()
    }

    pub fn render(&self) -> String {
        let mut out = format!("{:.12}", self.constant);
        match self.logpower {
            0 => {}
            1 => out.push_str(" * ln(n)"),
            l => out.push_str(&format!(" * ln(n)^{l}")),
        }
        out.push_str(&format!(" * n^({})", self.power));
        if self.base != 1.0 {
            match self.offset {
                0 => out.push_str(&format!(" * ({})^n", self.base)),
                o => out.push_str(&format!(" * ({})^(n{o:+})", self.base)),
            }
        }
        out
    }
}

fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

impl SingularTerm {
    /// Transfer-theorem estimate of the coefficients of this term.
    pub fn prediction(&self, s: u32) -> AsymptoticEstimate {
        let c = rational::to_f64(&self.c);
        let alpha = rational::to_f64(&self.alpha);
        let sign_b = if self.b % 2 == 0 { 1.0 } else { -1.0 };
        if is_nonneg_integer(&self.alpha) {
            let r = self.alpha.to_integer().to_u64().expect("small exponent");
            let sign_r = if r % 2 == 0 { 1.0 } else { -1.0 };
            let r_fact = rational::factorial(r).to_f64().expect("small factorial");
            AsymptoticEstimate {
                constant: c * sign_b * sign_r * r_fact * self.b as f64,
                base: s as f64,
                offset: 0,
                power: -(r as f64) - 1.0,
                logpower: self.b - 1,
            }
        } else {
            AsymptoticEstimate {
                constant: c * sign_b / gamma(-alpha),
                base: s as f64,
                offset: 0,
                power: -alpha - 1.0,
                logpower: self.b,
            }
        }
    }
}

/// Dominant types of the next-to^k leading-log expansion.
pub fn dominant_types(k: u32, s: u32) -> Result<Vec<DiagramType>, AsymptoticsError> {
    if s == 1 {
        if k == 0 {
            return Err(AsymptoticsError::Undefined);
        }
        return Ok(vec![DiagramType::new(2, vec![], vec![2; k as usize - 1])]);
    }
    Ok((0..=k).rev().map(|k1| DiagramType::new(1, vec![(1, 1); k1 as usize], vec![2; (k - k1) as usize])).collect())
}

/// `(k1, k2)` when `ty` is dominant for `s`.
fn dominant_shape(ty: &DiagramType, s: u32) -> Option<(u32, u32)> {
    let twos = ty.nonterminals.iter().all(|&d| d == 2);
    if s == 1 {
        (ty.delta == 2 && ty.gaps.is_empty() && twos).then_some((0, ty.nonterminals.len() as u32))
    } else {
        (ty.delta == 1 && ty.gaps.iter().all(|&g| g == (1, 1)) && twos)
            .then_some((ty.gaps.len() as u32, ty.nonterminals.len() as u32))
    }
}

/// Closed-form estimate of `[z^n] F_type` for a dominant type.
pub fn coefficient_estimate(ty: &DiagramType, s: u32) -> Result<AsymptoticEstimate, AsymptoticsError> {
    let (k1, k2) = dominant_shape(ty, s).ok_or_else(|| AsymptoticsError::NotDominant(ty.clone(), s))?;
    if s == 1 {
        let k = k2 + 1;
        let fact = rational::factorial(k as u64 - 1).to_f64().expect("small factorial");
        return Ok(AsymptoticEstimate { constant: 1.0 / fact, base: 1.0, offset: 0, power: -2.0, logpower: k - 1 });
    }
    let k = k1 + k2;
    let sf = s as f64;
    let fact = rational::factorial(k as u64).to_f64().expect("small factorial");
    let choose = binomial(k as i64, k1).to_f64().expect("small binomial");
    Ok(AsymptoticEstimate {
        constant: (sf - 1.0).powi(k1 as i32) * choose / (gamma(1.0 - 1.0 / sf) * fact),
        base: sf,
        offset: -(k as i64) - 1,
        power: -1.0 / sf - 1.0,
        logpower: k,
    })
}

fn value_of(values: &AValues, i: u32, j: u32) -> Result<BigRational, AsymptoticsError> {
    values.get(i, j).cloned().ok_or(AsymptoticsError::Algebra(AlgebraError::UnassignedSymbol(i, j)))
}

/// Closed-form estimate of `[z^n] H_k` at the given symbol values.
pub fn hk_estimate(k: u32, s: u32, values: &AValues) -> Result<AsymptoticEstimate, AsymptoticsError> {
    let a10 = value_of(values, 1, 0)?;
    if a10.is_zero() {
        return Err(AsymptoticsError::HypothesisViolated("a_{1,0} = 0".into()));
    }
    let a10f = rational::to_f64(&a10);
    let sf = s as f64;
    if s == 1 {
        if k == 0 {
            return Err(AsymptoticsError::Undefined);
        }
        let a20 = value_of(values, 2, 0)?;
        if a20.is_zero() {
            return Err(AsymptoticsError::HypothesisViolated("a_{2,0} = 0".into()));
        }
        let x = rational::to_f64(&a20) / a10f;
        let fact = rational::factorial(k as u64 - 1).to_f64().expect("small factorial");
        return Ok(AsymptoticEstimate {
            constant: -x.powi(k as i32) / fact,
            base: -a10f,
            offset: 0,
            power: k as f64 - 2.0,
            logpower: k - 1,
        });
    }
    let x = if k == 0 {
        1.0
    } else {
        let combo = value_of(values, 2, 0)? + rational::int(s as i64 - 1) * value_of(values, 1, 1)? * &a10;
        if combo.is_zero() {
            return Err(AsymptoticsError::HypothesisViolated("a_{2,0} + (s-1) a_{1,1} a_{1,0} = 0".into()));
        }
        rational::to_f64(&combo) / a10f
    };
    let fact = rational::factorial(k as u64).to_f64().expect("small factorial");
    Ok(AsymptoticEstimate {
        constant: -x.powi(k as i32) / (sf * gamma(1.0 - 1.0 / sf) * fact),
        base: -sf * a10f,
        offset: 0,
        power: k as f64 - 1.0 / sf - 1.0,
        logpower: k,
    })
}

/// `[z^n] H_k = -(-a_{1,0})^n [y^n] G` with `G` the valued closed form in
/// the original variable.
#[derive(Debug, Clone)]
pub struct HkCoefficient {
    pub n: usize,
    pub raw: RawCoefficient,
    pub a10: BigRational,
}

impl HkCoefficient {
    pub fn sign(&self) -> i32 {
        let mut sign = -self.raw.signum();
        if self.a10.is_positive() && self.n % 2 == 1 {
            sign = -sign;
        }
        sign
    }

    pub fn ln_abs(&self) -> f64 {
        self.raw.ln_abs() + self.n as f64 * rational::to_f64(&self.a10).abs().ln()
    }

    pub fn to_rational(&self) -> BigRational {
        let scale = num_traits::pow(-&self.a10, self.n);
        -(self.raw.to_rational() * scale)
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }
}

/// Streams exact `[z^n] H_k` for `n = 1..=n_max` at the given values.
pub fn for_each_hk_coefficient(
    k: u32,
    s: u32,
    values: &AValues,
    n_max: usize,
    mut f: impl FnMut(&HkCoefficient),
) -> Result<(), AsymptoticsError> {
    let (_, g, a10) = hk_closed_form(k, s).specialise(values)?;
    let mut slot = HkCoefficient { n: 0, raw: RawCoefficient { numer: BigInt::zero(), denom: BigInt::one() }, a10 };
    g.for_each_coefficient(n_max, |n, raw| {
        if n > 0 {
            slot.n = n;
            slot.raw = raw.clone();
            f(&slot);
        }
    });
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub exact: String,
    pub estimate: String,
    pub ratio: f64,
    pub neighbor_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub k: u32,
    pub s: u32,
    pub estimate: String,
    pub rows: Vec<ReportRow>,
    /// Predicted limit of `[z^{n+1}] / [z^n]`.
    pub neighbor_limit: f64,
    /// `n` in `[20, n_max]` where the sign differs from the estimate's.
    pub sign_mismatches: Vec<usize>,
}

/// `10, 20, 50, 100, ...` up to `n_max`, plus `n_max`.
pub fn sample_points(n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 10;
    while decade <= n_max {
        for m in [1, 2, 5] {
            if m * decade <= n_max {
                out.push(m * decade);
            }
        }
        decade *= 10;
    }
    if out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

/// Scientific notation from a sign and a natural log magnitude.
pub fn format_log_scale(sign: i32, ln_abs: f64) -> String {
    if sign == 0 {
        return "0".into();
    }
    let log10 = ln_abs / std::f64::consts::LN_10;
    let mut exp = log10.floor();
    let mut mant = 10f64.powf(log10 - exp);
    if mant >= 9.9999999995 {
        mant /= 10.0;
        exp += 1.0;
    }
    let sign = if sign < 0 { "-" } else { "" };
    format!("{sign}{mant:.10}e{exp}")
}

pub fn convergence_report(k: u32, s: u32, n_max: usize, values: &AValues) -> Result<ConvergenceReport, AsymptoticsError> {
    if n_max < 10 {
        return Err(AsymptoticsError::RangeTooShort(n_max));
    }
    let estimate = hk_estimate(k, s, values)?;
    let points = sample_points(n_max);
    let mut logs = Vec::with_capacity(n_max + 1);
    let mut exact = Vec::new();
    let mut mismatches = Vec::new();
    let mut next_point = 0;
    for_each_hk_coefficient(k, s, values, n_max + 1, |c| {
        logs.push((c.sign(), c.ln_abs()));
        if c.n >= 20 && c.n <= n_max && c.sign() != estimate.sign(c.n) {
            mismatches.push(c.n);
        }
        if next_point < points.len() && points[next_point] == c.n {
            exact.push(c.to_rational());
            next_point += 1;
        }
    })?;
    let rows = points
        .iter()
        .zip(exact)
        .map(|(&n, value)| {
            let (sign, ln) = logs[n - 1];
            let (next_sign, next_ln) = logs[n];
            let neighbor_ratio =
                if sign == 0 { f64::NAN } else { (sign * next_sign) as f64 * (next_ln - ln).exp() };
            ReportRow {
                n,
                exact: rational::to_string(&value),
                estimate: format_log_scale(estimate.sign(n), estimate.ln_abs(n)),
                ratio: estimate.ratio(n, sign, ln),
                neighbor_ratio,
            }
        })
        .collect();
    let a10 = rational::to_f64(&value_of(values, 1, 0)?);
    Ok(ConvergenceReport {
        k,
        s,
        estimate: estimate.render(),
        rows,
        neighbor_limit: -(s as f64) * a10,
        sign_mismatches: mismatches,
    })
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,exact,estimate,ratio,neighbor_ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.n, r.exact, r.estimate, r.ratio, r.neighbor_ratio));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("H_{} (s = {}) estimate: {}\n", self.k, self.s, self.estimate);
        out.push_str(&format!("{:>8}  {:>22}  {:>14}  {:>14}\n", "n", "estimate", "ratio", "neighbor"));
        for r in &self.rows {
            out.push_str(&format!("{:>8}  {:>22}  {:>14.10}  {:>14.10}\n", r.n, r.estimate, r.ratio, r.neighbor_ratio));
        }
        out.push_str(&format!("neighbor ratio limit: {}\n", self.neighbor_limit));
        if self.sign_mismatches.is_empty() {
            out.push_str("sign pattern holds from n = 20\n");
        } else {
            out.push_str(&format!("sign mismatches at {} values of n\n", self.sign_mismatches.len()));
        }
        out
    }
}

/// Ratios of exact `[z^n] F` to the transfer prediction from its leading
/// singular term, at each requested `n`.
pub fn transfer_ratios(f: &LogExpr, ns: &[usize]) -> Result<Vec<(usize, f64)>, AsymptoticsError> {
    let term = leading_singular_term(f)?;
    let est = term.prediction(f.s());
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    f.for_each_coefficient(n_max, |n, c| {
        if ns.contains(&n) {
            out.push((n, est.ratio(n, c.signum(), c.ln_abs())));
        }
    });
    Ok(out)
}

/// Signed log magnitudes of `[z^n] F` for each requested `n`.
pub fn coefficient_logs(f: &LogExpr, ns: &[usize]) -> Vec<(usize, i32, f64)> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    f.for_each_coefficient(n_max, |n, c| {
        if ns.contains(&n) {
            out.push((n, c.signum(), c.ln_abs()));
        }
    });
    out
}

/// Leading singular coefficient of a dominant `F` (s ≥ 2) next to two
/// candidate closed forms: the reference singular-expansion constant
/// `-(s-1)^{k1} s^{-(k+1)} C(k,k1) / k!`, and the one implied by the
/// coefficient estimate through the transfer theorem,
/// `(-1)^{k+1} (s-1)^{k1} s^{-k} C(k,k1) / k!`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularConstantNote {
    pub ty: DiagramType,
    #[serde(with = "rational")]
    pub observed: BigRational,
    #[serde(with = "rational")]
    pub reference: BigRational,
    #[serde(with = "rational")]
    pub implied_by_estimate: BigRational,
}

pub fn singular_constant_note(ty: &DiagramType, s: u32) -> Result<SingularConstantNote, AsymptoticsError> {
    let (k1, k2) = dominant_shape(ty, s).filter(|_| s >= 2).ok_or_else(|| AsymptoticsError::NotDominant(ty.clone(), s))?;
    let k = k1 + k2;
    let observed = leading_singular_term(&f_of_type(ty, s).f)?.c;
    let base = BigRational::new(
        num_traits::pow(BigInt::from(s - 1), k1 as usize) * binomial(k as i64, k1),
        rational::factorial(k as u64),
    );
    let s_pow = |e: u32| BigRational::from_integer(num_traits::pow(BigInt::from(s), e as usize));
    let reference = -(&base / s_pow(k + 1));
    let mut implied = &base / s_pow(k);
    if k.is_even() {
        implied = -implied;
    }
    Ok(SingularConstantNote { ty: ty.clone(), observed, reference, implied_by_estimate: implied })
}
