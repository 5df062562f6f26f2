//! Exact elements `a + b*sqrt(d)` of a real quadratic field.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::squarefree::squarefree_decompose;
use super::FareyError;
use crate::scalar::{rational_signum, rational_to_f64, Rational, Real};

/// `a + b*sqrt(d)` with rational `a`, `b` and square-free `d >= 1`.
///
/// Values are kept normalized: `b = 0` forces `d = 1` and `d = 1` folds `b`
/// into `a`, so structural equality is numeric equality. Arithmetic between
/// two irrational values of different fields is rejected; a rational operand
/// combines with any field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticIrrational {
    a: Rational,
    b: Rational,
    d: BigInt,
}

impl Hash for QuadraticIrrational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.numer().hash(state);
        self.a.denom().hash(state);
        self.b.numer().hash(state);
        self.b.denom().hash(state);
        self.d.hash(state);
    }
}

impl QuadraticIrrational {
    /// Builds `a + b*sqrt(d)`, pulling square factors of `d` into `b`.
    pub fn new(a: Rational, b: Rational, d: &BigInt) -> Result<Self, FareyError> {
        if !d.is_positive() {
            return Err(FareyError::InvalidRadicand(d.to_string()));
        }
        let n = d
            .to_u64()
            .ok_or_else(|| FareyError::TooLarge(format!("radicand {d}")))?;
        let (f, core) = squarefree_decompose(n);
        let b = b * Rational::from_integer(BigInt::from(f));
        Ok(Self::normalized(a, b, BigInt::from(core)))
    }

    fn normalized(a: Rational, b: Rational, d: BigInt) -> Self {
        if b.is_zero() {
            QuadraticIrrational {
                a,
                b,
                d: BigInt::one(),
            }
        } else if d.is_one() {
            QuadraticIrrational {
                a: a + b,
                b: Rational::zero(),
                d,
            }
        } else {
            QuadraticIrrational { a, b, d }
        }
    }

    pub fn from_rational(a: Rational) -> Self {
        QuadraticIrrational {
            a,
            b: Rational::zero(),
            d: BigInt::one(),
        }
    }

    /// `sqrt(n)` for a positive integer `n`.
    pub fn sqrt(n: u64) -> Result<Self, FareyError> {
        Self::new(Rational::zero(), Rational::one(), &BigInt::from(n))
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn irrational_coefficient(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `a - b*sqrt(d)`.
    pub fn conjugate(&self) -> Self {
        QuadraticIrrational {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
        }
    }

    /// Field norm `a^2 - b^2 d`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.clone())
    }

    fn common_field(&self, other: &Self) -> Result<BigInt, FareyError> {
        if self.is_rational() {
            Ok(other.d.clone())
        } else if other.is_rational() || self.d == other.d {
            Ok(self.d.clone())
        } else {
            Err(FareyError::FieldMismatch {
                left: self.d.to_string(),
                right: other.d.to_string(),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FareyError> {
        let d = self.common_field(other)?;
        Ok(Self::normalized(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FareyError> {
        let d = self.common_field(other)?;
        Ok(Self::normalized(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FareyError> {
        let d = self.common_field(other)?;
        let dq = Rational::from_integer(d.clone());
        let a = &self.a * &other.a + &self.b * &other.b * dq;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::normalized(a, b, d))
    }

    pub fn checked_recip(&self) -> Result<Self, FareyError> {
        let norm = self.norm();
        if norm.is_zero() {
            return Err(FareyError::DivisionByZero);
        }
        Ok(Self::normalized(
            &self.a / &norm,
            -(&self.b / &norm),
            self.d.clone(),
        ))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FareyError> {
        self.common_field(other)?;
        self.checked_mul(&other.checked_recip()?)
    }

    /// Exact sign of the value as -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        let sa = rational_signum(&self.a);
        let sb = rational_signum(&self.b);
        if sb == 0 || sa == sb {
            return if sa == 0 { sb } else { sa };
        }
        if sa == 0 {
            return sb;
        }
        match rational_signum(&self.norm()) {
            1 => sa,
            -1 => sb,
            _ => 0,
        }
    }

    /// Exact comparison, valid across different fields.
    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        let s = if let Ok(diff) = self.checked_sub(other) {
            diff.signum()
        } else {
            // sign(P - b2 sqrt(d2)) with P = (a1 - a2) + b1 sqrt(d1) in the first field.
            let p = Self::normalized(&self.a - &other.a, self.b.clone(), self.d.clone());
            let q = -other.b.clone();
            let sp = p.signum();
            let sq = rational_signum(&q);
            if sp == 0 || sq == 0 || sp == sq {
                if sp == 0 {
                    sq
                } else {
                    sp
                }
            } else {
                let p2 = p.checked_mul(&p).expect("same field");
                let q2 = Self::from_rational(&q * &q * Rational::from_integer(other.d.clone()));
                match p2.checked_sub(&q2).expect("rational operand").signum() {
                    1 => sp,
                    -1 => sq,
                    _ => 0,
                }
            }
        };
        s.cmp(&0)
    }

    /// `floor(self)` computed exactly with integer square roots.
    pub fn floor(&self) -> BigInt {
        // self = (A + B sqrt(d)) / C with integers A, B and C > 0.
        let c = self.a.denom().lcm(self.b.denom());
        let big_a = self.a.numer() * (&c / self.a.denom());
        let big_b = self.b.numer() * (&c / self.b.denom());
        let m = &big_b * &big_b * &self.d;
        let root = m.sqrt();
        let floor_b_sqrt_d = if !big_b.is_negative() {
            root
        } else if &root * &root == m {
            -root
        } else {
            -root - BigInt::one()
        };
        (big_a + floor_b_sqrt_d).div_floor(&c)
    }

    /// Truncated decimal expansion with `digits` digits after the point.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let negative = self.signum() < 0;
        let magnitude = if negative {
            -self.clone()
        } else {
            self.clone()
        };
        let scale = num_traits::pow(BigInt::from(10u8), digits);
        let scaled = Self::normalized(
            &magnitude.a * Rational::from_integer(scale.clone()),
            &magnitude.b * Rational::from_integer(scale.clone()),
            magnitude.d.clone(),
        )
        .floor();
        let (int_part, frac_part) = scaled.div_rem(&scale);
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if digits > 0 {
            out.push('.');
            let frac = frac_part.to_string();
            out.push_str(&"0".repeat(digits - frac.len()));
            out.push_str(&frac);
        }
        out
    }

    fn approx_f64(&self) -> f64 {
        if self.is_rational() {
            return rational_to_f64(&self.a);
        }
        let naive = rational_to_f64(&self.a)
            + rational_to_f64(&self.b) * self.d.to_f64().unwrap_or(f64::NAN).sqrt();
        // A decimal expansion with 20 significant digits, parsed with correct
        // rounding, avoids the cancellation in values like sqrt(2) - 1.
        let leading_zeros = if naive.is_finite() && naive != 0.0 {
            (-naive.abs().log10()).max(0.0) as usize
        } else {
            0
        };
        if leading_zeros > 300 {
            return naive;
        }
        self.to_decimal_string(20 + leading_zeros)
            .parse()
            .unwrap_or(naive)
    }
}

impl PartialOrd for QuadraticIrrational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            write!(f, "({}*sqrt({}))", self.b, self.d)
        } else if self.b.is_negative() {
            write!(f, "({}-{}*sqrt({}))", self.a, -self.b.clone(), self.d)
        } else {
            write!(f, "({}+{}*sqrt({}))", self.a, self.b, self.d)
        }
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for QuadraticIrrational {
            type Output = QuadraticIrrational;

            /// Panics when both operands are irrational in different fields;
            /// use the `checked_*` method to handle that case.
            fn $method(self, rhs: Self) -> Self {
                match self.$checked(&rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);
forward_op!(Div, div, checked_div);

impl Neg for QuadraticIrrational {
    type Output = QuadraticIrrational;

    fn neg(self) -> Self {
        QuadraticIrrational {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Zero for QuadraticIrrational {
    fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadraticIrrational {
    fn one() -> Self {
        Self::from_rational(Rational::one())
    }
}

impl Real for QuadraticIrrational {
    fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    fn from_bigint(n: &BigInt) -> Self {
        Self::from_rational(Rational::from_integer(n.clone()))
    }

    fn floor_int(&self) -> BigInt {
        self.floor()
    }

    fn to_f64(&self) -> f64 {
        self.approx_f64()
    }
}
