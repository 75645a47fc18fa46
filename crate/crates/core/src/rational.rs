//! Exact rational helpers shared by every module.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {literal:?}")]
pub struct RationalParseError {
    pub literal: String,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Floor as an integer.
pub fn floor(x: &Rational) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Ceiling as an integer.
pub fn ceil(x: &Rational) -> BigInt {
    -((-x.numer()).div_floor(x.denom()))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - Rational::from_integer(floor(x))
}

/// Parses `"p/q"`, `"p"` or an exact decimal such as `"-0.125"`.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let err = || RationalParseError { literal: text.to_string() };
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (negative, digits) = match int_part.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        let all_digits = |t: &str| t.chars().all(|c| c.is_ascii_digit());
        if (digits.is_empty() && frac_part.is_empty()) || !all_digits(digits) || !all_digits(frac_part) {
            return Err(err());
        }
        let joined = format!("{digits}{frac_part}");
        let numer = if joined.is_empty() { BigInt::zero() } else { BigInt::from_str(&joined).map_err(|_| err())? };
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = Rational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    let value = Rational::from_str(s).map_err(|_| err())?;
    Ok(value)
}

/// `"p/q"` or `"p"`; the inverse of [`parse_rational`] on its canonical outputs.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("0.5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational(".25").unwrap(), ratio(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn floor_ceil_frac() {
        assert_eq!(floor(&ratio(-3, 5)), BigInt::from(-1));
        assert_eq!(ceil(&ratio(-3, 5)), BigInt::from(0));
        assert_eq!(ceil(&ratio(7, 5)), BigInt::from(2));
        assert_eq!(frac(&ratio(-3, 5)), ratio(2, 5));
        assert_eq!(format_rational(&ratio(4, 2)), "2");
        assert_eq!(format_rational(&ratio(-1, 3)), "-1/3");
    }
}
