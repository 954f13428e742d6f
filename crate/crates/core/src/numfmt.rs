//! Fixed-significance number formatting for tabular output.

/// Significant digits written to every CSV cell.
pub const SIG_DIGITS: usize = 10;

/// `v` with [`SIG_DIGITS`] significant digits; scientific notation outside
/// `[1e-4, 1e15)`, `inf`/`-inf`/`NaN` spelled out.
pub fn fmt_sig(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs();
    if !(1e-4..1e15).contains(&mag) {
        return format!("{:.*e}", SIG_DIGITS - 1, v);
    }
    let exponent = mag.log10().floor() as i32;
    let decimals = (SIG_DIGITS as i32 - 1 - exponent).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding may have carried into a new leading digit (9.99.. -> 10.0..)
    let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
    let leading_zeros = s
        .trim_start_matches('-')
        .chars()
        .take_while(|&c| c == '0' || c == '.')
        .filter(|&c| c == '0')
        .count();
    if digits - leading_zeros > SIG_DIGITS && decimals > 0 {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}
