//! Deterministic number formatting for reports.

/// Rounds to 15 significant decimal digits.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Shortest decimal that round-trips the 15-digit rounding of `x`.
pub fn fmt_sig15(x: f64) -> String {
    format!("{:?}", round_sig15(x))
}
