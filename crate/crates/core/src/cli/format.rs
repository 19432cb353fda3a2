/// Twelve significant digits in scientific notation; `-0` prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Like [`fmt_f64`] but prints magnitudes below `1e-14` as zero.
pub fn fmt_chop(x: f64) -> String {
    fmt_f64(if x.abs() < 1e-14 { 0.0 } else { x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_mantissa() {
        assert_eq!(fmt_f64(-0.0), "0.00000000000e0");
        assert_eq!(fmt_f64(1.0 / 3.0), "3.33333333333e-1");
        assert_eq!(fmt_f64(-1234.5), "-1.23450000000e3");
    }
}
