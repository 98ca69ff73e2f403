//! Exact rational helpers: the `"p/q"` string encoding used by every JSON
//! surface, and float conversion of very large ratios.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use serde::{de, Deserialize, Deserializer, Serializer};

/// `"p/q"`, or just `"p"` for integers.
pub fn to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse(text: &str) -> Result<BigRational, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad rational numerator in {text:?}"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad rational denominator in {text:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(BigRational::new(num, den))
}

pub fn serialize<S: Serializer>(r: &BigRational, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&to_string(r))
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigRational, D::Error> {
    let text = String::deserialize(de)?;
    parse(&text).map_err(de::Error::custom)
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Base-2 decomposition `num/den = m * 2^e` with `m` an f64 in `[1, 2)`
/// (or zero). Works for operands far outside the f64 range.
pub fn ratio_log2_split(num: &BigInt, den: &BigInt) -> (f64, i64) {
    if num.is_zero() {
        return (0.0, 0);
    }
    let sign = if (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus) { -1.0 } else { 1.0 };
    let n = num.abs();
    let d = den.abs();
    // Keep ~80 significant bits in the integer quotient.
    let shift = d.bits() as i64 - n.bits() as i64 + 80;
    let q = if shift >= 0 { (n << shift as usize) / d } else { n / (d << (-shift) as usize) };
    let qbits = q.bits() as i64;
    let top = &q >> (qbits - 64).max(0) as usize;
    let mant = top.to_f64().unwrap_or(0.0);
    let exp = (qbits - 64).max(0) - shift;
    // Normalise mantissa into [1,2).
    let m_exp = mant.log2().floor() as i64;
    (sign * mant / 2f64.powi(m_exp as i32), exp + m_exp)
}

/// Nearest f64 to `num/den`; saturates to ±inf / 0 outside the f64 range.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    let (m, e) = ratio_log2_split(num, den);
    if m == 0.0 {
        return 0.0;
    }
    if e > 1023 {
        return m.signum() * f64::INFINITY;
    }
    if e < -1074 {
        return 0.0;
    }
    m * 2f64.powi(e as i32)
}

pub fn to_f64(r: &BigRational) -> f64 {
    ratio_to_f64(r.numer(), r.denom())
}

/// Natural log of |num/den|, finite even when the ratio itself overflows.
pub fn ratio_ln_abs(num: &BigInt, den: &BigInt) -> f64 {
    let (m, e) = ratio_log2_split(num, den);
    m.abs().ln() + e as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        for s in ["0", "7", "-3/4", "169/4515840"] {
            assert_eq!(to_string(&parse(s).unwrap()), s);
        }
        assert_eq!(to_string(&parse(" 6/4 ").unwrap()), "3/2");
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn huge_ratio_to_float() {
        let big = BigInt::from(3u32).pow(5000);
        let r = ratio_to_f64(&(&big * 7), &(&big * 2));
        assert!((r - 3.5).abs() < 1e-15);
        assert_eq!(ratio_to_f64(&big, &BigInt::one()), f64::INFINITY);
        let ln = ratio_ln_abs(&big, &BigInt::one());
        assert!((ln - 5000.0 * 3f64.ln()).abs() < 1e-9 * ln);
        assert!((ratio_to_f64(&BigInt::from(-1), &BigInt::from(3)) + 1.0 / 3.0).abs() < 1e-16);
    }
}
