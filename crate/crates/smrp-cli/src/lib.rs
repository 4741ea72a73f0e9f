//! IO companion for the tour-guidance solvers: JSON instance/solution
//! formats, the randomized instance generator, solver dispatch and the
//! benchmark harness. The `smrp` binary is a thin wrapper over these
//! modules.

pub mod bench;
pub mod formats;
pub mod gen;
pub mod solvers;

/// Formats a float with six significant digits in plain decimal, the
/// convention for all CSV output.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.000000".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (5 - exp).max(0) as usize;
    if exp > 5 {
        // Round away digits beyond the sixth before printing.
        let scale = 10f64.powi(exp - 5);
        format!("{:.0}", (x / scale).round() * scale)
    } else {
        format!("{x:.decimals$}")
    }
}

#[cfg(test)]
mod tests {
    use super::sig6;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.8), "0.800000");
        assert_eq!(sig6(437.2341799), "437.234");
        assert_eq!(sig6(1234567.89), "1234570");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(0.0), "0.000000");
        assert_eq!(sig6(-12.3456789), "-12.3457");
        assert_eq!(sig6(1.0), "1.00000");
    }
}
