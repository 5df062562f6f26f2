//! The Farey map, the Gauss map and the two inverse branches.

use super::word::Letter;
use super::FareyError;
use crate::scalar::Real;

fn half<T: Real>() -> T {
    T::one() / T::from_int(2)
}

fn domain<T: Real>(op: &'static str, x: &T) -> FareyError {
    FareyError::Domain {
        op,
        value: x.to_f64(),
    }
}

/// `x/(1-x)` on `[0, 1/2)`, `(1-x)/x` on `[1/2, 1]`.
pub fn farey<T: Real>(x: T) -> Result<T, FareyError> {
    if x < T::zero() || x > T::one() {
        return Err(domain("farey", &x));
    }
    if x < half() {
        Ok(x.clone() / (T::one() - x))
    } else {
        Ok((T::one() - x.clone()) / x)
    }
}

/// Fractional part of `1/x` for `x` in `(0, 1]`.
pub fn gauss<T: Real>(x: T) -> Result<T, FareyError> {
    if x <= T::zero() || x > T::one() {
        return Err(domain("gauss", &x));
    }
    let y = T::one() / x;
    let n = y.floor_int();
    Ok(y - T::from_bigint(&n))
}

/// `x/(x+1)`, onto `[0, 1/2]`.
pub fn inv_l<T: Real>(x: T) -> Result<T, FareyError> {
    if x < T::zero() || x > T::one() {
        return Err(domain("inv_l", &x));
    }
    Ok(Letter::L.apply(x))
}

/// `1/(x+1)`, onto `[1/2, 1]`.
pub fn inv_r<T: Real>(x: T) -> Result<T, FareyError> {
    if x < T::zero() || x > T::one() {
        return Err(domain("inv_r", &x));
    }
    Ok(Letter::R.apply(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::QuadraticIrrational;
    use crate::scalar::Rational;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn golden() -> QuadraticIrrational {
        QuadraticIrrational::new(q(-1, 2), q(1, 2), &BigInt::from(5)).unwrap()
    }

    #[test]
    fn golden_is_fixed_by_farey_and_gauss() {
        assert_eq!(farey(golden()).unwrap(), golden());
        assert_eq!(gauss(golden()).unwrap(), golden());
    }

    #[test]
    fn farey_examples() {
        assert_eq!(farey(Rational::zero()).unwrap(), Rational::zero());
        assert_eq!(farey(q(1, 2)).unwrap(), Rational::one());
        assert_eq!(farey(q(1, 3)).unwrap(), q(1, 2));
        assert!(matches!(farey(q(3, 2)), Err(FareyError::Domain { .. })));
        assert!(farey(-0.1f64).is_err());
    }

    #[test]
    fn gauss_examples() {
        assert_eq!(gauss(q(1, 2)).unwrap(), Rational::zero());
        assert_eq!(gauss(q(2, 5)).unwrap(), q(1, 2));
        assert!(gauss(Rational::zero()).is_err());
        // Agreement holds on the open interval; at 1/2 the Farey map gives 1.
        for (n, d) in [(3, 5), (5, 8), (9, 10), (51, 100)] {
            assert_eq!(gauss(q(n, d)).unwrap(), farey(q(n, d)).unwrap());
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inv_r(Rational::one()).unwrap(), q(1, 2));
        let mut x = 1.0f64;
        for _ in 0..60 {
            x = inv_r(x).unwrap();
        }
        assert!((x - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);

        let s2 = QuadraticIrrational::sqrt(2).unwrap();
        let inv_sqrt2 = QuadraticIrrational::new(q(0, 1), q(1, 2), &BigInt::from(2)).unwrap();
        let s2m1 = s2 - QuadraticIrrational::one();
        assert_eq!(inv_l(inv_sqrt2.clone()).unwrap(), s2m1);
        assert_eq!(inv_r(s2m1).unwrap(), inv_sqrt2);
        assert!(inv_l(q(2, 1)).is_err());
    }
}
