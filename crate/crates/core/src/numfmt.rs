//! Decimal formatting for reports.

/// Plain decimal string with 15 significant digits; scientific notation
/// outside `1e-6 ..= 1e15`.
pub fn sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&exp) {
        return format!("{x:.14e}");
    }
    let decimals = (14 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
