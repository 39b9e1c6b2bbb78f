//! JSON conversion helpers shared by bodies, cuts, certificates, and the
//! command-line front end.
//!
//! Exact rationals travel as `"p/q"` strings (explicit denominator, so no
//! reader ever confuses them with floats), field elements as two-entry
//! arrays `[rational part, coefficient of sqrt(m)]`, and machine-size
//! integers as plain JSON numbers with a string fallback for values outside
//! the `i64` range.  All conversions are exact; errors carry a plain
//! description of the offending value.

use num_traits::ToPrimitive;
use serde_json::Value;

use crate::numeric::{format_rational, parse_rational, Int, QuadExt, Rational};

pub fn rat_to_value(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

pub fn rat_from_value(v: &Value) -> Result<Rational, String> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        Value::Number(n) => {
            if let Some(k) = n.as_i64() {
                Ok(Rational::from_integer(Int::from(k)))
            } else {
                Err(format!("expected an exact rational, got {n}"))
            }
        }
        other => Err(format!("expected an exact rational, got {other}")),
    }
}

pub fn rat_vec_to_value(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(rat_to_value).collect())
}

pub fn rat_vec_from_value(v: &Value) -> Result<Vec<Rational>, String> {
    v.as_array()
        .ok_or_else(|| format!("expected an array of rationals, got {v}"))?
        .iter()
        .map(rat_from_value)
        .collect()
}

pub fn quad_to_value(x: &QuadExt) -> Value {
    if let Some(r) = x.to_rational() {
        rat_to_value(&r)
    } else {
        Value::Array(vec![rat_to_value(x.rat_part()), rat_to_value(x.irr_part())])
    }
}

pub fn quad_from_value(v: &Value, m: u64) -> Result<QuadExt, String> {
    match v {
        Value::Array(parts) => {
            if parts.len() != 2 {
                return Err(format!("field element needs two entries, got {}", parts.len()));
            }
            let rat = rat_from_value(&parts[0])?;
            let irr = rat_from_value(&parts[1])?;
            QuadExt::new(rat, irr, m).map_err(|e| e.to_string())
        }
        _ => Ok(QuadExt::rational(rat_from_value(v)?, m)),
    }
}

pub fn quad_vec_to_value(xs: &[QuadExt]) -> Value {
    Value::Array(xs.iter().map(quad_to_value).collect())
}

pub fn quad_vec_from_value(v: &Value, m: u64) -> Result<Vec<QuadExt>, String> {
    v.as_array()
        .ok_or_else(|| format!("expected an array of field elements, got {v}"))?
        .iter()
        .map(|e| quad_from_value(e, m))
        .collect()
}

pub fn int_to_value(k: &Int) -> Value {
    match k.to_i64() {
        Some(small) => Value::from(small),
        None => Value::String(k.to_string()),
    }
}

pub fn int_from_value(v: &Value) -> Result<Int, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Int::from)
            .ok_or_else(|| format!("expected an integer, got {n}")),
        Value::String(s) => s.parse().map_err(|_| format!("expected an integer, got {s:?}")),
        other => Err(format!("expected an integer, got {other}")),
    }
}

pub fn int_vec_to_value(ks: &[Int]) -> Value {
    Value::Array(ks.iter().map(int_to_value).collect())
}

pub fn int_vec_from_value(v: &Value) -> Result<Vec<Int>, String> {
    v.as_array()
        .ok_or_else(|| format!("expected an array of integers, got {v}"))?
        .iter()
        .map(int_from_value)
        .collect()
}

/// Fetches a required object field.
pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field {key:?}"))
}

#[cfg(test)]
mod tests {
    use num_traits::One;
    use serde_json::json;

    use super::*;

    #[test]
    fn rational_round_trip() {
        let x = Rational::new(Int::from(-3), Int::from(4));
        let v = rat_to_value(&x);
        assert_eq!(v, json!("-3/4"));
        assert_eq!(rat_from_value(&v).unwrap(), x);
        // Whole numbers still carry the denominator on output but plain
        // numbers are accepted on input.
        assert_eq!(rat_to_value(&Rational::one()), json!("1/1"));
        assert_eq!(rat_from_value(&json!(7)).unwrap(), Rational::from_integer(Int::from(7)));
    }

    #[test]
    fn quad_round_trip() {
        let x = QuadExt::new(
            Rational::new(Int::from(1), Int::from(2)),
            Rational::new(Int::from(-1), Int::from(3)),
            2,
        )
        .unwrap();
        let v = quad_to_value(&x);
        assert_eq!(v, json!(["1/2", "-1/3"]));
        assert_eq!(quad_from_value(&v, 2).unwrap(), x);
        // Rational field elements serialize as bare rationals.
        let r = QuadExt::rational(Rational::new(Int::from(5), Int::from(1)), 2);
        assert_eq!(quad_to_value(&r), json!("5/1"));
        assert_eq!(quad_from_value(&json!("5"), 2).unwrap(), r);
    }

    #[test]
    fn int_round_trip() {
        assert_eq!(int_to_value(&Int::from(-12)), json!(-12));
        assert_eq!(int_from_value(&json!(-12)).unwrap(), Int::from(-12));
        let big: Int = "123456789012345678901234567890".parse().unwrap();
        let v = int_to_value(&big);
        assert_eq!(v, json!("123456789012345678901234567890"));
        assert_eq!(int_from_value(&v).unwrap(), big);
    }
}
