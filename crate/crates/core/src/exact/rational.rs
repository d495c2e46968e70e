//! Helpers around [`BigRational`], the exact substrate for every certified claim.
//!
//! `num-rational` keeps values canonical (positive denominator, reduced) after
//! every operation; the functions here add decimal parsing, outward rounding
//! onto dyadic grids and a few comparisons that stay cheap when one side has a
//! very large numerator (as φ(ℓ) does for large ℓ).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use thiserror::Error;

/// Exact fraction with arbitrary-size numerator and denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty number")]
    Empty,
    #[error("invalid number {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("exponent out of range in {0:?}")]
    Exponent(String),
}

/// Parses `"0.01"`, `"1e-2"`, `"-3.5E+1"`, `"5"` or `"1/100"` into an exact rational.
///
/// No binary floating point is involved: `"0.1"` is exactly `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim(), text)?;
        let den = parse_decimal(den.trim(), text)?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(text.to_string()));
        }
        return Ok(num / den);
    }
    parse_decimal(s, text)
}

fn parse_decimal(s: &str, original: &str) -> Result<Rational, ParseRationalError> {
    let invalid = || ParseRationalError::Invalid(original.to_string());
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().map_err(|_| invalid())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(invalid());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigInt::from_str(&all_digits).map_err(|_| invalid())?;
    if negative {
        value = -value;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 1_000_000 {
        return Err(ParseRationalError::Exponent(original.to_string()));
    }
    let ten = BigInt::from(10u32);
    let power: BigInt = Pow::pow(&ten, scale.unsigned_abs());
    Ok(if scale >= 0 {
        Rational::from_integer(value * power)
    } else {
        Rational::new(value, power)
    })
}

/// Canonical `num/den` rendering (just `num` for integers).
pub fn to_fraction_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders `q` with `digits` digits after the decimal point, truncated toward zero.
///
/// Display only; never used in a certified decision.
pub fn to_decimal_string(q: &Rational, digits: usize) -> String {
    let scale: BigInt = Pow::pow(&BigInt::from(10u32), digits);
    let scaled = (q.abs() * Rational::from_integer(scale.clone())).to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    let sign = if q.is_negative() && !scaled.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
}

/// Lossy conversion for display and heuristics.
pub fn to_f64(q: &Rational) -> f64 {
    // Shift both parts down to at most ~1000 bits so the f64 division stays finite.
    let shift = |x: &BigInt| x.bits().saturating_sub(1000);
    let s = shift(q.numer()).max(shift(q.denom()));
    let n = q.numer() >> s;
    let d = q.denom() >> s;
    let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
    let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
    nf / df
}

/// Compares by cross-multiplication.
///
/// `Ord for Ratio` walks a continued-fraction expansion, each step a long
/// division; cross-multiplication is a single product and is much cheaper when
/// one operand is a small dyadic enclosure endpoint.
pub fn cmp_rational(a: &Rational, b: &Rational) -> Ordering {
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

pub fn pow2(exp: u64) -> BigInt {
    BigInt::one() << exp
}

/// Largest multiple of `2^-bits` that is `<= q`.
pub fn round_down(q: &Rational, bits: u32) -> Rational {
    if q.denom().bits() <= u64::from(bits) + 1 && is_dyadic(q) {
        return q.clone();
    }
    let scaled = q.numer() << bits;
    let floor = scaled.div_floor(q.denom());
    Rational::new(floor, pow2(u64::from(bits)))
}

/// Smallest multiple of `2^-bits` that is `>= q`.
pub fn round_up(q: &Rational, bits: u32) -> Rational {
    -round_down(&-q, bits)
}

fn is_dyadic(q: &Rational) -> bool {
    let d = q.denom().magnitude();
    d.is_one() || (d.count_ones() == 1)
}

/// Exact floor of `log2 |q|` for nonzero `q`.
pub fn floor_log2(q: &Rational) -> i64 {
    debug_assert!(!q.is_zero());
    let n = q.numer().magnitude();
    let d = q.denom().magnitude();
    let guess = n.bits() as i64 - d.bits() as i64;
    // 2^guess may overshoot by one.
    let lhs = |k: i64| -> bool {
        // Is 2^k <= n/d ?
        if k >= 0 {
            (d << (k as u64)) <= *n
        } else {
            *d <= (n << ((-k) as u64))
        }
    };
    if lhs(guess) {
        guess
    } else {
        guess - 1
    }
}

pub fn from_u64(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn biguint_to_rational(v: BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, v))
}

/// Exact integer ceiling.
pub fn ceil_int(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// Exact integer floor.
pub fn floor_int(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// Serde adapter storing a [`Rational`] as a `"num/den"` string.
pub mod serde_rational {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}

/// Display wrapper printing `num/den`.
pub struct Fraction<'a>(pub &'a Rational);

impl fmt::Display for Fraction<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_fraction_string(self.0))
    }
}
