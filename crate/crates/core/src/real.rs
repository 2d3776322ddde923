//! Fixed-format serialization of reals and rationals.
//!
//! Reals are written as JSON numbers with 17 significant digits
//! (`{:.16e}`), so identical computations produce identical bytes. Exact
//! rationals are written as `"num/den"` strings. Non-finite reals become
//! the strings `"inf"`, `"-inf"` or `"nan"`.

use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub fn format17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn json_real(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::Number::from_str(&format17(x))
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    } else if x.is_nan() {
        serde_json::Value::String("nan".into())
    } else if x > 0.0 {
        serde_json::Value::String("inf".into())
    } else {
        serde_json::Value::String("-inf".into())
    }
}

pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    json_real(*x).serialize(s)
}

pub fn ser_vec_f64<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    xs.iter().map(|x| json_real(*x)).collect::<Vec<_>>().serialize(s)
}

pub fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.map(json_real).serialize(s)
}

pub fn ser_matrix<S: Serializer>(m: &[[f64; 2]; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    m.iter()
        .flat_map(|row| row.iter().map(|x| json_real(*x)))
        .collect::<Vec<_>>()
        .serialize(s)
}

pub fn rational_string(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.3`.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let text = text.trim();
    let bad = || Error::MalformedInput(format!("not a rational: {text:?}"));
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        return Ok(Rational64::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().map_err(|_| bad())?;
        let mag = int.abs() * den + f;
        return Ok(Rational64::new(if neg { -mag } else { mag }, den));
    }
    text.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad())
}

pub fn rational_to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Serde adapter: `Rational64` as `"num/den"`.
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_string(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational64, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format17(std::f64::consts::LN_2), "6.9314718055994529e-1");
        assert_eq!(json_real(1.0).to_string(), "1.0000000000000000e+0");
        assert_eq!(json_real(f64::INFINITY), serde_json::json!("inf"));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/12").unwrap(), Rational64::new(1, 4));
        assert_eq!(parse_rational("0.3").unwrap(), Rational64::new(3, 10));
        assert_eq!(parse_rational("-1.25").unwrap(), Rational64::new(-5, 4));
        assert_eq!(parse_rational("7").unwrap(), Rational64::from_integer(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(rational_string(&Rational64::new(6, 4)), "3/2");
    }
}
