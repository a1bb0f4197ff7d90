//! Exact rational scalars: construction, parsing, and formatting.
//!
//! All exact layers of the crate work over arbitrary-precision rationals,
//! kept reduced with positive denominators by the underlying representation.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};

pub type Rational = num::BigRational;

/// Integer as a rational.
pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Fraction from an integer numerator and nonzero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Exact value of a finite binary64 float (no rounding: every finite f64 is rational).
pub fn rat_from_f64(v: f64) -> Result<Rational> {
    Rational::from_float(v).ok_or_else(|| Error::Parse(format!("non-finite float {v}")))
}

/// Nearest-double conversion, for plotting and float-side numerics.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Small power with a nonnegative integer exponent.
pub fn rat_pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Canonical string form: `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses `p/q`, integer, or plain decimal strings (e.g. `3/7`, `-2`, `0.25`).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_part = if int_part == "-" || int_part.is_empty() {
            "0"
        } else {
            int_part
        };
        let i: BigInt = int_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?;
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal in {s:?}")));
        }
        let f: BigInt = frac_part
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?;
        let scale = num::pow::pow(BigInt::from(10), frac_part.len());
        let mag = i.abs() * &scale + f;
        let mag = if negative { -mag } else { mag };
        return Ok(Rational::new(mag, scale));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Rational::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/7").unwrap(), rat(3, 7));
        assert_eq!(parse_rational("-2").unwrap(), rat_int(-2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn format_round_trip() {
        for s in ["3/7", "-2", "0", "22/7", "-5/3"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
        // Decimals reparse to the same value, in canonical fraction form.
        let r = parse_rational("0.1").unwrap();
        assert_eq!(format_rational(&r), "1/10");
    }

    #[test]
    fn exact_float_conversion() {
        // 0.1 is not 1/10 in binary64; the conversion must be exact, not pretty.
        let r = rat_from_f64(0.1).unwrap();
        assert_eq!(
            format_rational(&r),
            "3602879701896397/36028797018963968"
        );
        assert_eq!(rat_from_f64(0.5).unwrap(), rat(1, 2));
        assert!(rat_from_f64(f64::NAN).is_err());
    }

    #[test]
    fn pow_small() {
        assert_eq!(rat_pow(&rat(2, 3), 3), rat(8, 27));
        assert_eq!(rat_pow(&rat(5, 1), 0), rat_int(1));
    }
}
