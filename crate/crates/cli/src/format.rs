//! Number formatting for the two output modes: 6 fixed decimals in text,
//! 9 significant digits (printf %g style, trailing zeros stripped) in CSV.

pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// %.9g-style formatting: fixed notation while the exponent fits, scientific
/// otherwise, trailing zeros removed. Deterministic for identical inputs.
pub fn fmt_g9(x: f64) -> String {
    format_sig(x, 9)
}

fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -4 || exp >= sig as i32 {
        let s = format!("{:.*e}", sig - 1, x);
        match s.split_once('e') {
            Some((mantissa, exponent)) => format!("{}e{}", strip_zeros(mantissa), exponent),
            None => s,
        }
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}"))
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_basic() {
        assert_eq!(fmt_g9(0.0), "0");
        assert_eq!(fmt_g9(1.0), "1");
        assert_eq!(fmt_g9(0.8), "0.8");
        assert_eq!(fmt_g9(1.131370850), "1.13137085");
        assert_eq!(fmt_g9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_g9(-2.5), "-2.5");
    }

    #[test]
    fn g9_scientific() {
        assert_eq!(fmt_g9(1.23e-7), "1.23e-7");
        assert_eq!(fmt_g9(3.0e12), "3e12");
        assert_eq!(fmt_g9(0.0001), "0.0001");
        assert_eq!(fmt_g9(0.00001), "1e-5");
    }

    #[test]
    fn fixed6() {
        assert_eq!(fmt6(1.1313708499), "1.131371");
        assert_eq!(fmt6(0.0), "0.000000");
    }
}
