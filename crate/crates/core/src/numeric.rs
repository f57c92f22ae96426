//! Small numeric kernels shared by the profile code: a safeguarded
//! bisection/Newton root finder, composite Simpson quadrature over uniform
//! samples and a `%g`-style decimal formatter used by the text exporters.

use crate::error::{DropError, Result};

/// Safeguarded Newton iteration on a sign-changing bracket.
///
/// `lo` and `hi` must bracket a root of `f` (`f(lo)` and `f(hi)` of opposite
/// sign, or one of them zero). Newton steps are taken only when they land
/// strictly inside the current bracket; otherwise the bracket is bisected.
/// Iteration stops once `|f(x)| <= abs_tol` and the bracket has collapsed to
/// a few ulps, or after a fixed iteration budget.
pub fn bracketed_newton<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(DropError::Domain(format!(
            "no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})"
        )));
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        let width = hi - lo;
        if fx.abs() <= abs_tol && width <= 8.0 * f64::EPSILON * x.abs().max(1.0) {
            return Ok(x);
        }

        let slope = df(x);
        let newton = if slope != 0.0 && slope.is_finite() {
            x - fx / slope
        } else {
            f64::NAN
        };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x {
            // Newton has converged to a fixed point; accept it if the residual allows.
            if fx.abs() <= abs_tol {
                return Ok(x);
            }
            x = 0.5 * (lo + hi);
        } else {
            x = next;
        }
        if hi - lo <= f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    if f(x).abs() <= abs_tol {
        Ok(x)
    } else {
        Err(DropError::Domain(format!(
            "root iteration stalled at x = {x} with residual {}",
            f(x)
        )))
    }
}

/// Composite Simpson rule over uniformly spaced samples `values` with spacing `h`.
///
/// An odd number of intervals is handled by closing with the Simpson 3/8
/// panel on the last three intervals. Two samples fall back to the
/// trapezoid; zero or one sample integrates to zero.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        _ if n % 2 == 1 => simpson_even_intervals(values, h),
        4 => three_eighths(&values[0..4], h),
        _ => simpson_even_intervals(&values[..n - 3], h) + three_eighths(&values[n - 4..], h),
    }
}

fn simpson_even_intervals(values: &[f64], h: f64) -> f64 {
    debug_assert!(values.len() % 2 == 1);
    let last = values.len() - 1;
    let mut acc = values[0] + values[last];
    for (i, v) in values.iter().enumerate().take(last).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

fn three_eighths(v: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3])
}

/// Formats `x` like C's `%.{sig}g`: `sig` significant digits, trailing zeros
/// trimmed, scientific notation outside `1e-5 <= |x| < 10^sig`.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
