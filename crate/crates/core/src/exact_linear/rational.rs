use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_rational_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_int(a: &[Rational], b: &[i64]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(_, &y)| y != 0)
        .fold(Rational::zero(), |acc, (x, &y)| acc + x * BigInt::from(y))
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Parses `"p/q"`, `"p"`, with an optional leading ASCII `-` or U+2212 minus.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let trimmed = text.trim();
    let (negative, body) = if let Some(rest) = trimmed.strip_prefix('\u{2212}') {
        (true, rest)
    } else if let Some(rest) = trimmed.strip_prefix('-') {
        (true, rest)
    } else {
        (false, trimmed.strip_prefix('+').unwrap_or(trimmed))
    };
    let bad = || Error::Parse(format!("invalid rational {text:?}"));
    if body.is_empty() || body.starts_with(['-', '+', '\u{2212}']) {
        return Err(bad());
    }
    let (num_text, den_text) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (body, None),
    };
    let digits_only = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits_only(num_text) || !den_text.is_none_or(digits_only) {
        return Err(bad());
    }
    let mut num: BigInt = num_text.parse().map_err(|_| bad())?;
    let den: BigInt = match den_text {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    if negative {
        num = -num;
    }
    Ok(Rational::new(num, den))
}

/// Decimal expansion truncated toward zero after `digits` fractional digits.
pub fn decimal_string(q: &Rational, digits: usize) -> String {
    let sign = if q.is_negative() { "-" } else { "" };
    let abs = q.abs();
    let whole = abs.numer() / abs.denom();
    let mut rem = abs.numer() % abs.denom();
    let mut out = format!("{sign}{whole}");
    if digits > 0 {
        out.push('.');
        let ten = BigInt::from(10);
        for _ in 0..digits {
            rem *= &ten;
            let digit = &rem / abs.denom();
            rem %= abs.denom();
            out.push_str(&digit.to_string());
        }
    }
    out
}

/// Serde adapter: a rational as its `"p/q"` string.
pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = RationalText::deserialize(d)?;
        text.into_rational().map_err(serde::de::Error::custom)
    }

    /// Accepts either a JSON string or a JSON integer.
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RationalText {
        Text(String),
        Int(i64),
    }

    impl RationalText {
        pub(crate) fn into_rational(self) -> crate::error::Result<Rational> {
            match self {
                RationalText::Text(t) => parse_rational(&t),
                RationalText::Int(n) => Ok(super::int(n)),
            }
        }
    }
}

pub mod serde_rational_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::serde_rational::RationalText;
    use super::Rational;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&q.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<RationalText>::deserialize(d)?
            .into_iter()
            .map(|t| t.into_rational().map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_rational_vecs {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::serde_rational::RationalText;
    use super::Rational;

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for row in v {
            let strings: Vec<String> = row.iter().map(|q| q.to_string()).collect();
            seq.serialize_element(&strings)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        Vec::<Vec<RationalText>>::deserialize(d)?
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|t| t.into_rational().map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_forms_and_unicode_minus() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("\u{2212}4/6").unwrap(), ratio(-2, 3));
        assert_eq!(parse_rational(" -5 ").unwrap(), int(-5));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["1/0", "", "/3", "1/", "a", "--1", "1.5", "2/-3"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn display_omits_unit_denominator() {
        assert_eq!(ratio(4, 2).to_string(), "2");
        assert_eq!(ratio(-3, 9).to_string(), "-1/3");
    }

    #[test]
    fn decimal_expansion() {
        assert_eq!(decimal_string(&ratio(1, 3), 5), "0.33333");
        assert_eq!(decimal_string(&ratio(-13, 4), 3), "-3.250");
        assert_eq!(decimal_string(&int(3), 2), "3.00");
    }

    proptest::proptest! {
        #[test]
        fn print_parse_roundtrip(n in -10_000i64..10_000, d in 1i64..500, m in -50i64..50, e in 1i64..50) {
            let a = ratio(n, d);
            let b = ratio(m, e);
            let c = &a * &b - &a / &int(3) + &b;
            proptest::prop_assert_eq!(parse_rational(&c.to_string()).unwrap(), c);
        }
    }
}
