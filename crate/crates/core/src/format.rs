//! Locale-independent fixed-point formatting for reports.
//!
//! Values are rounded to four decimals with round-half-even applied to the
//! shortest decimal representation of the `f64`, so `0.00005` prints as
//! `0.0000` and `0.00015` as `0.0002` regardless of binary representation
//! error.

use std::str::FromStr;

use rust_decimal::{Decimal, RoundingStrategy};

pub const DECIMALS: u32 = 4;

fn rounded(x: f64) -> Option<Decimal> {
    if !x.is_finite() {
        return None;
    }
    // Anything this small rounds to zero under every strategy, and its
    // shortest representation may not fit a Decimal.
    let d = if x.abs() < 1e-9 {
        Decimal::ZERO
    } else {
        Decimal::from_str(&x.to_string()).ok()?
    };
    let mut r = d.round_dp_with_strategy(DECIMALS, RoundingStrategy::MidpointNearestEven);
    r.rescale(DECIMALS);
    if r.is_zero() {
        r.set_sign_positive(true);
    }
    Some(r)
}

/// `x` with exactly four decimals, e.g. `0.4755`, `-0.2300`.
pub fn fixed4(x: f64) -> String {
    match rounded(x) {
        Some(d) => d.to_string(),
        None => format!("{x:.4}"),
    }
}

/// `x` rounded to four decimals as an `f64`, for JSON output.
pub fn round4(x: f64) -> f64 {
    rounded(x)
        .and_then(|d| d.to_string().parse().ok())
        .unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pads_and_rounds() {
        assert_eq!(fixed4(0.68), "0.6800");
        assert_eq!(fixed4(0.4755), "0.4755");
        assert_eq!(fixed4(1.0), "1.0000");
        assert_eq!(fixed4(0.0), "0.0000");
        assert_eq!(fixed4(0.71 - 0.48), "0.2300");
        assert_eq!(fixed4(0.48 - 0.71), "-0.2300");
    }

    #[test]
    fn half_even_on_decimal_ties() {
        assert_eq!(fixed4(0.00005), "0.0000");
        assert_eq!(fixed4(0.00015), "0.0002");
        assert_eq!(fixed4(0.12345), "0.1234");
        assert_eq!(fixed4(0.12355), "0.1236");
        assert_eq!(fixed4(-0.00005), "0.0000");
    }

    #[test]
    fn tiny_values_are_zero() {
        assert_eq!(fixed4(1e-300), "0.0000");
        assert_eq!(fixed4(-1e-17), "0.0000");
        assert_eq!(round4(0.49625), 0.4962);
    }
}
