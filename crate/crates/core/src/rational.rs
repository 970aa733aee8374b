//! Exact rational numbers and their `"p/q"` wire format.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.25"`.
pub fn parse(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidParams(format!("cannot parse rational {text:?}"));
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let whole = match int_part.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => BigInt::from_str(digits).map_err(|_| bad())?,
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = BigInt::from_str(frac_part).map_err(|_| bad())?;
        let mut value = Rational::new(whole * &scale + frac, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let value = Rational::from_str(text).map_err(|_| bad())?;
    Ok(value)
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format(value: &Rational) -> String {
    value.to_string()
}

pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

/// Scales nonnegative rationals to integers sharing one denominator.
///
/// Fails when the common scale does not fit into `u128`.
pub fn scale_to_integers(values: &[Rational]) -> Result<Vec<u128>> {
    use num_traits::ToPrimitive;
    let lcm = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    values
        .iter()
        .map(|v| {
            if v.is_negative() {
                return Err(Error::InvalidParams("negative weight".into()));
            }
            let scaled = v.numer() * (&lcm / v.denom());
            scaled
                .to_u128()
                .ok_or_else(|| Error::InvalidParams("weights too large to scale exactly".into()))
        })
        .collect()
}

/// Serde adapter: a single rational as a string; numbers are accepted on input.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = RawRational::deserialize(d)?;
        raw.into_rational().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = values.iter().map(format).collect();
        strings.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<RawRational>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_rational().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Vec<Rational>>` (serialize only).
pub mod serde_rational_vec_opt {
    use super::*;

    pub fn serialize<S: Serializer>(values: &Option<Vec<Rational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        values
            .as_ref()
            .map(|v| v.iter().map(format).collect::<Vec<_>>())
            .serialize(s)
    }
}

/// Input form of a rational: `"3/4"`, `"0.75"`, `3` or `0.75` in JSON.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RawRational {
    Text(String),
    Int(i64),
    Float(f64),
}

impl RawRational {
    pub fn into_rational(self) -> Result<Rational> {
        match self {
            RawRational::Text(t) => parse(&t),
            RawRational::Int(i) => Ok(int(i)),
            RawRational::Float(f) => parse(&format!("{f}")),
        }
    }
}

impl Serialize for RawRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RawRational::Text(t) => s.serialize_str(t),
            RawRational::Int(i) => s.serialize_i64(*i),
            RawRational::Float(f) => s.serialize_f64(*f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse("6/8").unwrap(), ratio(3, 4));
        assert_eq!(parse("5").unwrap(), int(5));
        assert_eq!(parse("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format(&ratio(4, 8)), "1/2");
        assert_eq!(format(&int(6)), "6");
        assert_eq!(format(&ratio(-1, 2)), "-1/2");
    }

    #[test]
    fn scaling_shares_denominator() {
        let scaled = scale_to_integers(&[ratio(1, 2), ratio(1, 3), int(2)]).unwrap();
        assert_eq!(scaled, vec![3, 2, 12]);
        assert!(scale_to_integers(&[int(-1)]).is_err());
    }

    #[test]
    fn float_input_is_exact_decimal() {
        let r: RawRational = serde_json::from_str("0.75").unwrap();
        assert_eq!(r.into_rational().unwrap(), ratio(3, 4));
    }
}
