//! Coefficients that stay exact when they start out as fractions.

use std::fmt;
use std::ops::{Add, Mul, Neg};
use std::str::FromStr;

use num_rational::Rational64;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A real coefficient, either an exact fraction or a double.
///
/// Serialized as the string `"p/q"` (or `"p"`) when exact and as a JSON
/// number otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coeff {
    Exact(Rational64),
    Float(f64),
}

impl Coeff {
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Coeff::Exact(Rational64::new(numer, denom))
    }

    pub fn int(v: i64) -> Self {
        Coeff::Exact(Rational64::from_integer(v))
    }

    /// Exact value of a decimal literal such as `"-0.0052555"`.
    pub fn decimal(s: &str) -> Self {
        parse_decimal(s).unwrap_or_else(|| panic!("`{s}` is not a decimal literal"))
    }

    pub fn value(&self) -> f64 {
        match *self {
            Coeff::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Coeff::Float(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        self.value() == 0.0
    }

    /// Product with a double; exact if `v` is a small integer.
    pub fn mul_f64(self, v: f64) -> Coeff {
        if v.fract() == 0.0 && v.abs() < (1u64 << 52) as f64 {
            return self * Coeff::int(v as i64);
        }
        Coeff::Float(self.value() * v)
    }

}

/// Sum, exact when both operands are exact and nothing overflows.
impl Add for Coeff {
    type Output = Coeff;

    fn add(self, other: Coeff) -> Coeff {
        if let (Coeff::Exact(a), Coeff::Exact(b)) = (self, other) {
            if let Some(s) = checked_add(a, b) {
                return Coeff::Exact(s);
            }
        }
        Coeff::Float(self.value() + other.value())
    }
}

/// Product, exact when both operands are exact and nothing overflows.
impl Mul for Coeff {
    type Output = Coeff;

    fn mul(self, other: Coeff) -> Coeff {
        if let (Coeff::Exact(a), Coeff::Exact(b)) = (self, other) {
            if let Some(p) = checked_mul(a, b) {
                return Coeff::Exact(p);
            }
        }
        Coeff::Float(self.value() * other.value())
    }
}

impl Neg for Coeff {
    type Output = Coeff;

    fn neg(self) -> Coeff {
        match self {
            Coeff::Exact(r) => Coeff::Exact(-r),
            Coeff::Float(v) => Coeff::Float(-v),
        }
    }
}

fn parse_decimal(s: &str) -> Option<Coeff> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 17 {
        return None;
    }
    let digits: i64 = format!("{int}{frac}").parse().ok()?;
    let denom = 10i64.checked_pow(frac.len() as u32)?;
    Some(Coeff::ratio(if neg { -digits } else { digits }, denom))
}

fn checked_add(a: Rational64, b: Rational64) -> Option<Rational64> {
    let (an, ad, bn, bd) = (*a.numer() as i128, *a.denom() as i128, *b.numer() as i128, *b.denom() as i128);
    reduce(an * bd + bn * ad, ad * bd)
}

fn checked_mul(a: Rational64, b: Rational64) -> Option<Rational64> {
    let (an, ad, bn, bd) = (*a.numer() as i128, *a.denom() as i128, *b.numer() as i128, *b.denom() as i128);
    reduce(an * bn, ad * bd)
}

fn reduce(n: i128, d: i128) -> Option<Rational64> {
    let g = num_integer::gcd(n, d).max(1);
    let (n, d) = (n / g, d / g);
    Some(Rational64::new(i64::try_from(n).ok()?, i64::try_from(d).ok()?))
}

impl From<f64> for Coeff {
    fn from(v: f64) -> Self {
        Coeff::Float(v)
    }
}

impl From<Rational64> for Coeff {
    fn from(r: Rational64) -> Self {
        Coeff::Exact(r)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Coeff::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Coeff::Float(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Coeff {
    type Err = String;

    /// Parses `"p/q"`, an integer, or a decimal.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|e| format!("bad numerator in `{s}`: {e}"))?;
            let d: i64 = d.trim().parse().map_err(|e| format!("bad denominator in `{s}`: {e}"))?;
            if d == 0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            return Ok(Coeff::ratio(n, d));
        }
        if let Some(c) = parse_decimal(s) {
            return Ok(c);
        }
        s.parse::<f64>()
            .map(Coeff::Float)
            .map_err(|e| format!("bad coefficient `{s}`: {e}"))
    }
}

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Coeff::Exact(_) => serializer.serialize_str(&self.to_string()),
            Coeff::Float(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CoeffVisitor;

        impl Visitor<'_> for CoeffVisitor {
            type Value = Coeff;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a fraction string \"p/q\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Coeff, E> {
                Ok(Coeff::Float(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Coeff, E> {
                Ok(Coeff::Float(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Coeff, E> {
                Ok(Coeff::Float(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Coeff, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(CoeffVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic() {
        let a = Coeff::ratio(35, 18);
        let b = Coeff::ratio(1, 18);
        assert_eq!(a + b, Coeff::int(2));
        assert_eq!(a * Coeff::ratio(18, 5), Coeff::int(7));
        assert_eq!(Coeff::ratio(3, 5).mul_f64(-1.0), Coeff::ratio(-3, 5));
        assert!(!Coeff::ratio(3, 5).mul_f64(0.5).is_exact());
        assert_eq!(Coeff::Float(0.5) + Coeff::ratio(1, 2), Coeff::Float(1.0));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(Coeff::decimal("1.3115"), Coeff::ratio(13115, 10000));
        assert_eq!(Coeff::decimal("-0.000107266"), Coeff::ratio(-107266, 1_000_000_000));
        assert_eq!("7".parse::<Coeff>().unwrap(), Coeff::int(7));
        assert_eq!("2.5e-3".parse::<Coeff>().unwrap(), Coeff::Float(2.5e-3));
    }

    #[test]
    fn overflow_falls_back_to_float() {
        let big = Coeff::ratio(i64::MAX / 2, 3);
        let p = big * Coeff::ratio(7, 11);
        assert!(!p.is_exact());
        assert!((p.value() - (i64::MAX / 2) as f64 * 7.0 / 33.0).abs() / p.value() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        for c in [Coeff::ratio(-55, 72), Coeff::int(3), Coeff::Float(0.1 + 0.2), Coeff::Float(-1e-300)] {
            let s = serde_json::to_string(&c).unwrap();
            let back: Coeff = serde_json::from_str(&s).unwrap();
            assert_eq!(back, c, "{s}");
        }
        assert_eq!(serde_json::to_string(&Coeff::ratio(7, 12)).unwrap(), "\"7/12\"");
        assert!("1/0".parse::<Coeff>().is_err());
    }
}
