//! Exact rational helpers shared by every discrete pipeline.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

use crate::error::{AuctionError, Result};

/// Arbitrary precision rational used for masses, values and revenues.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Formats as `"p/q"`, or `"p"` for integers.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.25"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || AuctionError::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(AuctionError::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = Q::new(int_part.abs() * &scale + frac_part, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Rounds `x` to the nearest multiple of `2^-bits`.
pub fn dyadic(x: f64, bits: u32) -> Q {
    let scaled = (x * 2f64.powi(bits as i32)).round();
    let numer = BigInt::from(scaled as i128);
    Q::new(numer, BigInt::one() << bits)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Q>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub fn max_q<'a>(values: impl IntoIterator<Item = &'a Q>) -> Option<&'a Q> {
    values.into_iter().max()
}

pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let raw = RawNumber::deserialize(d)?;
        raw.into_q().map_err(de::Error::custom)
    }
}

pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let raw = Vec::<RawNumber>::deserialize(d)?;
        raw.into_iter()
            .map(|r| r.into_q().map_err(de::Error::custom))
            .collect()
    }
}

/// A JSON number or string that should become a rational.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RawNumber {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RawNumber {
    pub fn into_q(self) -> Result<Q> {
        match self {
            RawNumber::Int(i) => Ok(qi(i)),
            RawNumber::Float(f) => {
                Q::from_float(f).ok_or_else(|| AuctionError::Parse(format!("non-finite number {f}")))
            }
            RawNumber::Text(s) => parse_q(&s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/16").unwrap(), q(3, 16));
        assert_eq!(parse_q("6/32").unwrap(), q(3, 16));
        assert_eq!(parse_q("7").unwrap(), qi(7));
        assert_eq!(parse_q("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_q("-1.5").unwrap(), q(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert_eq!(format_q(&q(6, 4)), "3/2");
        assert_eq!(format_q(&qi(2)), "2");
    }

    #[test]
    fn dyadic_rounding() {
        assert_eq!(dyadic(0.5, 10), q(1, 2));
        let x = dyadic(1.0 / 3.0, 20);
        assert!((to_f64(&x) - 1.0 / 3.0).abs() <= 2f64.powi(-21));
    }

    #[test]
    fn lcm_of_denominators() {
        let v = [q(1, 4), q(1, 6), qi(3)];
        assert_eq!(common_denominator(&v), BigInt::from(12));
    }
}
