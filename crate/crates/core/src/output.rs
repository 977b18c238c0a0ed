//! Numeric formatting shared by every CSV writer.

/// Significant digits written for floating-point values.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Format `x` with 12 significant digits. Plain decimal notation is used
/// for magnitudes in `[1e-6, 1e15)`; smaller or larger values use
/// exponent notation. Trailing zeros are trimmed.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let mag = x.abs();
    if (1e-6..1e15).contains(&mag) {
        // Round first so that the exponent reflects the rounded value.
        let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
        let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
        let (mantissa, exp) = sci.split_at(sci.find('e').unwrap());
        format!("{}{}", trim(mantissa.to_string()), exp)
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
