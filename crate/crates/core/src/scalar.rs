//! Numeric scalars shared by the boosting engine and the continued-fraction code.
//!
//! Every run picks one numeric mode: exact arbitrary-precision rationals or
//! `f64`. The engine is generic over [`Scalar`], so a trace never mixes the two.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational number used in exact mode.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Mode {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(ParseScalarError::new(other, "expected `exact` or `float`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{input}`: {reason}")]
pub struct ParseScalarError {
    pub input: String,
    pub reason: &'static str,
}

impl ParseScalarError {
    fn new(input: &str, reason: &'static str) -> Self {
        ParseScalarError {
            input: input.to_string(),
            reason,
        }
    }
}

/// An ordered field element with an exact floor.
///
/// Implemented for `f64`, [`Rational`] and
/// [`QuadraticIrrational`](crate::farey::QuadraticIrrational), which is
/// enough to run the Farey and Gauss maps over any of them.
pub trait Real:
    Clone
    + PartialOrd
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(n: i64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;

    /// Largest integer not exceeding `self`.
    fn floor_int(&self) -> BigInt;

    fn to_f64(&self) -> f64;

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }
}

/// Scalar used for weights and edges of a boosting run.
pub trait Scalar: Real + Send + Sync + 'static {
    const MODE: Mode;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    /// Lossless text form: `p/q` for rationals, shortest round-trip decimal for floats.
    fn to_text(&self) -> String;

    fn parse_text(s: &str) -> Result<Self, ParseScalarError>;

    /// Exact equality in exact mode, `|a - b| <= tol` in float mode.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// Rational value of `self`: the number itself in exact mode, a
    /// continued-fraction reconstruction with denominator at most `max_den`
    /// and error at most `tol` in float mode.
    fn rationalize(&self, max_den: u64, tol: f64) -> Option<Rational>;

    fn is_exact() -> bool {
        Self::MODE == Mode::Exact
    }
}

impl Real for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }

    fn floor_int(&self) -> BigInt {
        BigInt::from_f64(self.floor()).unwrap_or_default()
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn parse_text(s: &str) -> Result<Self, ParseScalarError> {
        let s = s.trim();
        if s.contains('/') {
            return parse_rational(s).map(|r| rational_to_f64(&r));
        }
        s.parse::<f64>()
            .map_err(|_| ParseScalarError::new(s, "not a floating-point number"))
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn rationalize(&self, max_den: u64, tol: f64) -> Option<Rational> {
        rationalize_f64(*self, max_den, tol)
    }
}

impl Real for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn from_bigint(n: &BigInt) -> Self {
        Rational::from_integer(n.clone())
    }

    fn floor_int(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Exact;

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn parse_text(s: &str) -> Result<Self, ParseScalarError> {
        parse_rational(s)
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn rationalize(&self, _max_den: u64, _tol: f64) -> Option<Rational> {
        Some(self.clone())
    }
}

/// Parses `p/q`, an integer, or a decimal such as `-0.125` or `2.5e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseScalarError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseScalarError::new(s, "empty input"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| ParseScalarError::new(s, "bad numerator"))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| ParseScalarError::new(s, "bad denominator"))?;
        if q.is_zero() {
            return Err(ParseScalarError::new(s, "zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| ParseScalarError::new(s, "bad exponent"))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(ParseScalarError::new(s, "no digits"));
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(ParseScalarError::new(s, "not a number"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().expect("validated digits")
    };
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Correctly scaled conversion that survives numerators and denominators beyond `f64` range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    let n_bits = r.numer().bits() as i64;
    let d_bits = r.denom().bits() as i64;
    // Shift so the integer quotient carries 64 significant bits.
    let shift = 64 - (n_bits - d_bits);
    let scaled = if shift >= 0 {
        (r.numer() << shift as usize) / r.denom()
    } else {
        r.numer() / (r.denom() << (-shift) as usize)
    };
    let q = scaled.to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(-shift as i32)
}

/// Best rational approximation of `x` with denominator `<= max_den` via
/// continued-fraction convergents; `None` when it misses `x` by more than `tol`.
pub fn rationalize_f64(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let target = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut rest = target;
    let mut best: Option<(u128, u128)> = None;
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_den as u128 {
            break;
        }
        best = Some((p2, q2));
        if ((p2 as f64) / (q2 as f64) - target).abs() <= f64::EPSILON * target.max(1.0) {
            break;
        }
        let frac = rest - a;
        if frac <= 0.0 {
            break;
        }
        rest = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let (p, q) = best?;
    if ((p as f64) / (q as f64) - target).abs() > tol {
        return None;
    }
    let numer = BigInt::from(p);
    let value = Rational::new(if negative { -numer } else { numer }, BigInt::from(q));
    Some(value)
}

/// Sign of a rational as -1, 0 or 1.
pub(crate) fn rational_signum(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("2/5").unwrap(), q(2, 5));
        assert_eq!(parse_rational("0.4").unwrap(), q(2, 5));
        assert_eq!(parse_rational("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_rational("1e-3").unwrap(), q(1, 1000));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn float_text_round_trips() {
        for x in [0.1, 1.0 / 3.0, 0.6180339887498949, 1e-300, 5e-324] {
            let text = x.to_text();
            assert_eq!(f64::parse_text(&text).unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn rational_floor_handles_negatives() {
        assert_eq!(q(-1, 2).floor_int(), BigInt::from(-1));
        assert_eq!(q(5, 2).floor_int(), BigInt::from(2));
        assert_eq!(q(4, 2).floor_int(), BigInt::from(2));
    }

    #[test]
    fn rational_to_f64_handles_huge_terms() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = Rational::new(big.clone() + BigInt::one(), big * BigInt::from(3));
        assert!((rational_to_f64(&r) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize_f64(0.375, 1_000_000, 1e-12), Some(q(3, 8)));
        assert_eq!(rationalize_f64(1.0 / 7.0, 1_000_000, 1e-12), Some(q(1, 7)));
        assert_eq!(rationalize_f64(-0.5, 10, 1e-12), Some(q(-1, 2)));
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(rationalize_f64(golden, 1_000_000, 1e-15), None);
    }
}
