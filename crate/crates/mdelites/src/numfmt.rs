//! Number formatting shared by the exporters.

/// Shortest decimal that parses back to exactly `v`.
pub fn shortest(v: f64) -> String {
    format!("{v}")
}

/// `v` rounded to `digits` significant digits, `%g` style: plain notation
/// for exponents in `-5..digits`, scientific otherwise, trailing zeros
/// removed.
pub fn significant(v: f64, digits: usize) -> String {
    assert!(digits > 0);
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("LowerExp output has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
