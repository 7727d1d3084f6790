//! Locale-free number formatting for reports and CSV output.

/// `x` rounded to six significant digits in plain decimal notation,
/// falling back to scientific notation for very large or small magnitudes.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.5e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if !(-6..=15).contains(&exp) {
        return sci;
    }
    let decimals = (5 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().expect("valid float");
    format!("{rounded:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(3.57712345), "3.57712");
        assert_eq!(sig6(0.0384), "0.0384000");
        assert_eq!(sig6(-0.053123456), "-0.0531235");
        assert_eq!(sig6(1988.0), "1988.00");
        assert_eq!(sig6(123456789.0), "123457000");
        assert_eq!(sig6(9.9999996), "10.0000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1.5e-9), "1.50000e-9");
    }
}
