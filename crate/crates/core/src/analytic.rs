//! Closed-form scalar functions of the axisymmetric profile.
//!
//! With the profile written as a graph `u(r)` and `psi` the angle its
//! tangent makes with the radial direction, the mean curvature equation
//! integrates once to
//!
//! ```text
//! sin psi(r) = f(r) = r (a r^2 + 2b) / 4 + d / r
//! ```
//!
//! and differentiating gives the curvature of the planar generating curve,
//! `kappa(r) = (3 a r^2 + 2b) / 4` (for `d = 0`). Everything in this module
//! is a pure function of those two expressions.

use serde::Serialize;
use std::fmt;

use crate::error::{DropError, Result};
use crate::numeric::bracketed_newton;

/// Absolute tolerance on `f(r) -/+ 1` when locating `c0`.
pub const ROOT_TOL: f64 = 1e-12;

/// Slack allowed when deciding `v(r1) >= 1` so that the exact threshold pair
/// `a = -2 b^3 / 27` lands on the Type IIa side despite rounding.
const THRESHOLD_SLACK: f64 = 1e-12;

/// Coefficients of one drop family: `2H = a r^2 + b`, initial height `u0`
/// and first-integral constant `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DropParams {
    pub a: f64,
    pub b: f64,
    pub u0: f64,
    pub d: f64,
}

impl DropParams {
    /// Parameters of a profile through the axis (`d = 0`).
    pub fn new(a: f64, b: f64, u0: f64) -> Self {
        Self { a, b, u0, d: 0.0 }
    }

    pub fn with_d(self, d: f64) -> Self {
        Self { d, ..self }
    }

    pub fn validate_finite(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("u0", self.u0), ("d", self.d)] {
            if !v.is_finite() {
                return Err(DropError::InvalidParameter(format!("{name} = {v} is not finite")));
            }
        }
        Ok(())
    }

    /// True when `b >= 0` and, for `b = 0`, `a >= 0`.
    pub fn is_canonical(&self) -> bool {
        self.b > 0.0 || (self.b == 0.0 && self.a >= 0.0)
    }

    /// Applies `u(r; u0, a, b) = -u(r; -u0, -a, -b)` when needed to reach the
    /// canonical orientation. The returned flag records whether the flip happened.
    pub fn canonicalize(&self) -> (DropParams, bool) {
        if self.is_canonical() {
            (*self, false)
        } else {
            (
                DropParams {
                    a: -self.a,
                    b: -self.b,
                    u0: -self.u0,
                    d: -self.d,
                },
                true,
            )
        }
    }

    /// `a = b = 0`: the minimal (flat) graph, which never closes.
    pub fn is_degenerate(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }

    pub(crate) fn require_axis_profile(&self) -> Result<()> {
        if self.d != 0.0 {
            return Err(DropError::InvalidParameter(format!(
                "d = {} describes a toroidal profile; only d = 0 is supported here",
                self.d
            )));
        }
        Ok(())
    }
}

/// Shape class of the closed axisymmetric drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SurfaceType {
    /// `a > 0`: convex, embedded, closes where `f = 1`.
    TypeI,
    /// `a < 0` and `f` reaches 1 before its maximum: convex, embedded.
    TypeIIa,
    /// `a < 0` and `f` turns before reaching 1: the profile rises to `r2`,
    /// falls, and closes where `f = -1`.
    TypeIIb,
    /// `a = 0`: constant mean curvature, a round sphere of radius `2 / b`.
    CMC,
}

impl SurfaceType {
    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceType::TypeI => "TypeI",
            SurfaceType::TypeIIa => "TypeIIa",
            SurfaceType::TypeIIb => "TypeIIb",
            SurfaceType::CMC => "CMC",
        }
    }

    /// Sign of `sin psi` at the vertical tangent that closes the profile.
    pub fn closing_sign(&self) -> f64 {
        match self {
            SurfaceType::TypeIIb => -1.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for SurfaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `f(r) = r (a r^2 + 2b) / 4 + d / r`, the sine of the tangent angle.
pub fn first_integral(r: f64, p: &DropParams) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(DropError::InvalidParameter(format!("radius {r} must be >= 0")));
    }
    if p.d != 0.0 && r == 0.0 {
        return Err(DropError::Domain(
            "first integral with d != 0 is singular at r = 0".into(),
        ));
    }
    let core = 0.25 * r * (p.a * r * r + 2.0 * p.b);
    Ok(if p.d == 0.0 { core } else { core + p.d / r })
}

/// Same as [`first_integral`] for `d = 0`, without the error plumbing.
#[inline]
pub(crate) fn sin_psi(r: f64, a: f64, b: f64) -> f64 {
    0.25 * r * (a * r * r + 2.0 * b)
}

/// Curvature of the generating curve, `kappa(r) = (3 a r^2 + 2b) / 4`.
#[inline]
pub fn profile_curvature(r: f64, p: &DropParams) -> f64 {
    0.25 * (3.0 * p.a * r * r + 2.0 * p.b)
}

/// Classifies the closed drop generated by `(a, b)`.
///
/// Non-canonical input is flipped first, so `classify(a, b)` and
/// `classify(-a, -b)` agree. For `a < 0` the maximum of `f` sits at
/// `r1 = sqrt(-2b / 3a)`; the drop is Type IIa when `f(r1) >= 1`, which works
/// out to `a >= -2 b^3 / 27`. The test is made on `f(r1)` itself.
pub fn classify(a: f64, b: f64) -> Result<SurfaceType> {
    let (p, _) = DropParams::new(a, b, 0.0).canonicalize();
    p.validate_finite()?;
    if p.is_degenerate() {
        return Err(DropError::InvalidParameter(
            "a = b = 0 is a minimal graph and does not close".into(),
        ));
    }
    let (a, b) = (p.a, p.b);
    Ok(if a == 0.0 {
        SurfaceType::CMC
    } else if a > 0.0 {
        SurfaceType::TypeI
    } else {
        let r1 = (-2.0 * b / (3.0 * a)).sqrt();
        if sin_psi(r1, a, b) >= 1.0 - THRESHOLD_SLACK {
            SurfaceType::TypeIIa
        } else {
            SurfaceType::TypeIIb
        }
    })
}

/// True on the Type IIa / IIb boundary, `f(r1) = 1` up to the classification
/// slack. There the profile approaches `r = c0` asymptotically and never
/// reaches a vertical tangent.
pub fn at_type_ii_threshold(a: f64, b: f64) -> bool {
    let (p, _) = DropParams::new(a, b, 0.0).canonicalize();
    if !(p.a < 0.0 && p.b > 0.0) {
        return false;
    }
    let r1 = (-2.0 * p.b / (3.0 * p.a)).sqrt();
    (sin_psi(r1, p.a, p.b) - 1.0).abs() <= THRESHOLD_SLACK
}

/// Inflection radius `r1 = sqrt(-2b / 3a)` and height-maximum radius
/// `r2 = sqrt(-2b / a)` of a Type II profile.
pub fn critical_radii(a: f64, b: f64) -> Result<(f64, f64)> {
    if !(a < 0.0) || !(b > 0.0) {
        return Err(DropError::InvalidParameter(format!(
            "critical radii need a < 0 and b > 0 (got a = {a}, b = {b})"
        )));
    }
    Ok(((-2.0 * b / (3.0 * a)).sqrt(), (-2.0 * b / a).sqrt()))
}

/// Maximal radius `c0` of the profile graph, where `|f(c0)| = 1`.
///
/// For Types I, IIa and CMC this is the unique root of `f = 1` on the
/// increasing branch of `f`. For Type IIb it is the root of `f = -1` past
/// `r2`, found by doubling an outer bracket from `2 r2`.
pub fn find_c0(a: f64, b: f64) -> Result<f64> {
    let kind = classify(a, b)?;
    let (p, _) = DropParams::new(a, b, 0.0).canonicalize();
    let (a, b) = (p.a, p.b);
    let g = |target: f64| move |r: f64| sin_psi(r, a, b) - target;
    let dg = |r: f64| 0.25 * (3.0 * a * r * r + 2.0 * b);

    match kind {
        SurfaceType::CMC => Ok(2.0 / b),
        SurfaceType::TypeI => {
            let mut hi = 1.0;
            while sin_psi(hi, a, b) < 1.0 {
                hi *= 2.0;
                if !hi.is_finite() {
                    return Err(DropError::Domain("no bracket for c0".into()));
                }
            }
            bracketed_newton(g(1.0), dg, 0.0, hi, ROOT_TOL)
        }
        SurfaceType::TypeIIa => {
            let (r1, _) = critical_radii(a, b)?;
            // f increases on [0, r1] and f(r1) >= 1 (up to the threshold slack).
            if sin_psi(r1, a, b) <= 1.0 {
                // Tangential contact at the threshold: r1 itself is the root.
                let resid = (sin_psi(r1, a, b) - 1.0).abs();
                if resid <= THRESHOLD_SLACK {
                    return Ok(r1);
                }
            }
            bracketed_newton(g(1.0), dg, 0.0, r1, ROOT_TOL)
        }
        SurfaceType::TypeIIb => {
            let (_, r2) = critical_radii(a, b)?;
            let mut k = 2.0;
            loop {
                let hi = r2 * k;
                if sin_psi(hi, a, b) <= -1.0 {
                    return bracketed_newton(g(-1.0), dg, r2, hi, ROOT_TOL);
                }
                k *= 2.0;
                if !(r2 * k).is_finite() {
                    return Err(DropError::Domain(format!(
                        "no sign change of f + 1 found beyond r2 = {r2}"
                    )));
                }
            }
        }
    }
}

/// Comparison circle through the axis point of the profile with the same
/// slope as the profile at radius `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonCircle {
    /// Radius `R = c / f(c) = 4 / (a c^2 + 2b)`.
    pub radius: f64,
    /// Height of the circle's centre, `R + u0`.
    pub center_height: f64,
    /// Vertical shift taking the upper circle `y` onto the lower one `w`:
    /// `w(r) = y(r) + w_offset`, chosen so that `w(c) = u(c)`.
    pub w_offset: f64,
    pub c: f64,
}

impl ComparisonCircle {
    /// `y(r) = R + u0 - sqrt(R^2 - r^2)`, written without cancellation.
    pub fn upper(&self, r: f64) -> f64 {
        let u0 = self.center_height - self.radius;
        u0 + r * r / (self.radius + (self.radius * self.radius - r * r).max(0.0).sqrt())
    }

    /// `w(r) = y(r) - y(c) + u(c)`.
    pub fn lower(&self, r: f64) -> f64 {
        self.upper(r) + self.w_offset
    }
}

/// Builds the comparison circles at truncation radius `c` for a profile with
/// height `u_c` at `c`. Requires `a >= 0`, `b >= 0`, `0 < c` and `f(c) > 0`,
/// and `c <= c0`.
pub fn comparison_circle(c: f64, p: &DropParams, u_c: f64) -> Result<ComparisonCircle> {
    p.require_axis_profile()?;
    if !(p.a >= 0.0 && p.b >= 0.0) || p.is_degenerate() {
        return Err(DropError::InvalidParameter(format!(
            "comparison circles need a >= 0, b >= 0, not both zero (got a = {}, b = {})",
            p.a, p.b
        )));
    }
    if !(c > 0.0) {
        return Err(DropError::InvalidParameter(format!(
            "truncation radius {c} must be > 0"
        )));
    }
    let c0 = find_c0(p.a, p.b)?;
    if c > c0 * (1.0 + 1e-12) {
        return Err(DropError::OutOfRange {
            requested: c,
            limit: c0,
        });
    }
    let fc = sin_psi(c, p.a, p.b);
    if !(fc > 0.0) {
        return Err(DropError::Domain(format!("f({c}) = {fc} is not positive")));
    }
    // At c0 the circle is the one through the vertical tangent: c0 m = 4.
    let radius = if c == c0 { c0 } else { 4.0 / (p.a * c * c + 2.0 * p.b) };
    let mut circle = ComparisonCircle {
        radius,
        center_height: radius + p.u0,
        w_offset: 0.0,
        c,
    };
    circle.w_offset = u_c - circle.upper(c);
    Ok(circle)
}
