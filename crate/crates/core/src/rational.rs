//! Exact rational helpers shared by every module: parsing, certified
//! enclosures and exact comparison of `log(count) / size` quantities.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"3"`, `"-1/3"`, `"0.125"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::OutOfRange(format!("not a rational number: `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{whole}{frac}");
    let num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(num * Pow::pow(&ten, scale as u32))
    } else {
        Rational::new(num, Pow::pow(&ten, (-scale) as u32))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `n/d` rendered as `"n/d"` or `"n"`; the form used in reports.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter that writes rationals as `"n/d"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// A certified enclosure `[lo, hi]` of a real quantity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
}

impl Interval {
    pub fn exact(q: Rational) -> Self {
        Interval { lo: q.clone(), hi: q }
    }

    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn zero() -> Self {
        Self::exact(Rational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Three-way comparison against a threshold; `None` when the enclosure
    /// straddles it.
    pub fn compare(&self, t: &Rational) -> Option<Ordering> {
        if self.hi < *t {
            Some(Ordering::Less)
        } else if self.lo > *t {
            Some(Ordering::Greater)
        } else if self.is_exact() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", fmt_rational(&self.lo))
        } else {
            write!(f, "[{}, {}]", fmt_rational(&self.lo), fmt_rational(&self.hi))
        }
    }
}

const SQRT_BITS: u32 = 64;

/// Rational lower and upper bounds for `sqrt(q)`, exact when `q` is a
/// square of a rational, otherwise `2^-64`-tight relative to the denominator.
pub fn sqrt_bounds(q: &Rational) -> (Rational, Rational) {
    assert!(!q.is_negative(), "sqrt of a negative rational");
    let (n, d) = (q.numer().clone(), q.denom().clone());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &rn * &rn == n && &rd * &rd == d {
        let r = Rational::new(rn, rd);
        return (r.clone(), r);
    }
    // sqrt(n/d) = sqrt(n*d)/d
    let scale = BigInt::one() << SQRT_BITS;
    let radicand = &n * &d * &scale * &scale;
    let root = radicand.sqrt();
    let den = &d * &scale;
    let lo = Rational::new(root.clone(), den.clone());
    let hi = Rational::new(root + 1, den);
    (lo, hi)
}

/// The real number `ln(count) / size` kept in exact form; comparisons use
/// `a^m` against `b^n` so ties are decided without rounding.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LogRatio {
    pub count: BigUint,
    pub size: u64,
}

impl LogRatio {
    pub fn new(count: BigUint, size: u64) -> Self {
        assert!(size > 0, "LogRatio needs a positive size");
        assert!(!count.is_zero(), "LogRatio needs a positive count");
        LogRatio { count, size }
    }

    pub fn zero() -> Self {
        LogRatio { count: BigUint::one(), size: 1 }
    }

    pub fn value(&self) -> f64 {
        biguint_ln(&self.count) / self.size as f64
    }
}

impl fmt::Display for LogRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.count.is_one() {
            write!(f, "0")
        } else if self.size == 1 {
            write!(f, "log({})", self.count)
        } else {
            write!(f, "log({})/{}", self.count, self.size)
        }
    }
}

impl PartialEq for LogRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LogRatio {}

impl Ord for LogRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = Pow::pow(&self.count, other.size);
        let rhs = Pow::pow(&other.count, self.size);
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for LogRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Natural log of a big unsigned integer without overflowing `f64`.
pub fn biguint_ln(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational("-2.50").unwrap(), ratio(-5, 2));
        assert_eq!(parse_rational("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn sqrt_bounds_are_exact_on_squares() {
        let (lo, hi) = sqrt_bounds(&ratio(1, 4));
        assert_eq!(lo, ratio(1, 2));
        assert_eq!(hi, ratio(1, 2));
        let (lo, hi) = sqrt_bounds(&int(2));
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert!(to_f64(&(hi - lo)) < 1e-15);
    }

    #[test]
    fn log_ratio_ordering_is_exact() {
        let a = LogRatio::new(BigUint::from(8u32), 3);
        let b = LogRatio::new(BigUint::from(2u32), 1);
        assert_eq!(a.cmp(&b), Ordering::Equal);
        let c = LogRatio::new(BigUint::from(2584u32), 16);
        assert!(c < LogRatio::new(BigUint::from(2u32), 1));
        assert!((c.value() - (2584f64).ln() / 16.0).abs() < 1e-12);
    }
}
