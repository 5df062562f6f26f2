use crate::scalar::Scalar;

/// `x` with 12 significant digits in plain decimal notation.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&magnitude) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `p/q` in exact mode, 12 significant digits in float mode.
pub fn format_scalar<S: Scalar>(x: &S) -> String {
    if S::is_exact() {
        x.to_text()
    } else {
        format_f64(x.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_f64((5f64.sqrt() - 1.0) / 2.0), "0.618033988750");
        assert_eq!(format_f64(2f64.sqrt() - 1.0), "0.414213562373");
        assert_eq!(format_f64(0.5), "0.500000000000");
        assert_eq!(format_f64(12.5), "12.5000000000");
        assert_eq!(format_f64(0.0), "0");
        assert_eq!(format_f64(1.5e-9), "1.50000000000e-9");
        assert_eq!(format_scalar(&Rational::new(3.into(), 5.into())), "3/5");
    }
}
