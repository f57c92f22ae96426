//! Integrated quantities of a profile.
//!
//! All integrals run over the uniform arc-length samples with the composite
//! Simpson rule. `dr = cos psi ds` and `u' dr = sin psi ds` are substituted
//! analytically, so nothing divides by `u'` and the vertical tangent at `c0`
//! is harmless:
//!
//! ```text
//! A(c)  = 2 pi int r ds
//! V(c)  = 2 pi int r^2 sin psi ds           (= 2 pi int_0^c r^2 u' dr)
//! E(c)  = A(c) + 2 pi int (a r^2 + b) u r cos psi ds
//! Q(N1) = -4 pi a int r^2 sin psi ds
//! ```
//!
//! `V(c0)` is the volume of the closed drop; for `c < c0` it is the volume of
//! the body obtained by mirroring the truncated graph about `x3 = u(c)`.

use std::borrow::Cow;
use std::f64::consts::PI;

use serde::Serialize;

use crate::analytic::find_c0;
use crate::error::{DropError, Result};
use crate::numeric::simpson_uniform;
use crate::ode::{ClosedProfile, ProfileCurve};

/// Guard for relative residual denominators.
pub const RESIDUAL_EPS: f64 = 1e-300;

fn window(curve: &ProfileCurve, c: f64) -> Result<Cow<'_, ProfileCurve>> {
    let c = curve.resolve_radius(c)?;
    if c == curve.c_end() {
        Ok(Cow::Borrowed(curve))
    } else {
        Ok(Cow::Owned(curve.truncated(c)?))
    }
}

fn integrate<F>(curve: &ProfileCurve, integrand: F) -> f64
where
    F: Fn(f64, f64, f64) -> f64,
{
    let values: Vec<f64> = curve.samples().iter().map(|x| integrand(x.r, x.u, x.psi)).collect();
    simpson_uniform(&values, curve.sample_spacing())
}

/// `A(c)`: area of the revolved graph over `[0, c]`.
pub fn area(curve: &ProfileCurve, c: f64) -> Result<f64> {
    let w = window(curve, c)?;
    Ok(2.0 * PI * integrate(&w, |r, _, _| r))
}

/// `2 pi int_0^c r^2 u'(r) dr`.
pub fn volume(curve: &ProfileCurve, c: f64) -> Result<f64> {
    let w = window(curve, c)?;
    Ok(volume_integral(&w))
}

fn volume_integral(curve: &ProfileCurve) -> f64 {
    2.0 * PI * integrate(curve, |r, _, psi| r * r * psi.sin())
}

/// `u(c) - u0`.
pub fn height(curve: &ProfileCurve, c: f64) -> Result<f64> {
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok(curve.u_at(c)? - curve.params().u0)
}

/// Energy of the revolved graph over `[0, c]` with the upward normal
/// (`N3 = cos psi`): area plus `a int r^2 x3 N3 + b int x3 N3`.
pub fn energy(curve: &ProfileCurve, c: f64) -> Result<f64> {
    let w = window(curve, c)?;
    let p = *w.params();
    let weighted = integrate(&w, |r, u, psi| (p.a * r * r + p.b) * u * r * psi.cos());
    Ok(2.0 * PI * (integrate(&w, |r, _, _| r) + weighted))
}

/// Area of the closed drop, `2 A(c0)`.
pub fn closed_area(closed: &ProfileCurve) -> f64 {
    4.0 * PI * integrate(closed, |r, _, _| r)
}

/// Energy of the closed drop with the normal of the lower graph
/// (`N3 = cos psi`, pointing into the drop) continued across the mirror
/// plane. The two halves combine to
/// `2 A(c0) - 4 pi int (a r^2 + b) (u(c0) - u) r dr`, which does not depend
/// on the vertical placement of the drop.
pub fn closed_energy(closed: &ClosedProfile) -> f64 {
    let lower = closed.lower();
    let p = *lower.params();
    let m = closed.mirror_height();
    let weighted = integrate(lower, |r, u, psi| (p.a * r * r + p.b) * (m - u) * r * psi.cos());
    closed_area(lower) - 4.0 * PI * weighted
}

/// `Q(N1) = -4 pi a int_0^c0 r^2 u'(r) dr`, the second variation evaluated on
/// the horizontal Gauss map component. A negative value certifies that the
/// closed drop is unstable.
pub fn stability_q_n1(closed: &ClosedProfile) -> f64 {
    let a = closed.lower().params().a;
    if a == 0.0 {
        return 0.0;
    }
    -2.0 * a * volume_integral(closed.lower())
}

/// Both sides of the boundary flux identity on the circle of radius `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxCheck {
    /// `2 pi c^2 (a c^2 + 2b)`.
    pub lhs: f64,
    /// `8 pi c sin psi(c)`, with `sin psi` taken from the integrated curve.
    pub rhs: f64,
    pub residual: f64,
}

pub fn boundary_flux_check(curve: &ProfileCurve, c: f64) -> Result<FluxCheck> {
    let p = curve.params();
    let state = curve.state_at_radius(c)?;
    let lhs = 2.0 * PI * c * c * (p.a * c * c + 2.0 * p.b);
    let rhs = 8.0 * PI * c * state.psi.sin();
    let residual = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(RESIDUAL_EPS);
    Ok(FluxCheck { lhs, rhs, residual })
}

/// `4 / c - |a c^2 + 2b|`; negative means no surface can span a horizontal
/// circle of radius `c`.
pub fn heinz_margin(c: f64, a: f64, b: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(DropError::InvalidParameter(format!("boundary radius {c} must be > 0")));
    }
    Ok(4.0 / c - (a * c * c + 2.0 * b).abs())
}

/// Summary record; the field names are part of the JSON interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantityReport {
    pub area: f64,
    pub volume: f64,
    pub height: f64,
    pub energy: f64,
    pub q_n1: f64,
    pub c0: f64,
    pub flux_residual: f64,
    pub heinz_margin: f64,
}

impl QuantityReport {
    /// Quantities of the closed drop: total area, enclosed volume, total
    /// height `2 (u(c0) - u0)` and closed-surface energy.
    pub fn for_closed(closed: &ClosedProfile) -> Result<Self> {
        let lower = closed.lower();
        let p = lower.params();
        let c = closed.c0();
        Ok(Self {
            area: closed_area(lower),
            volume: volume_integral(lower),
            height: closed.total_height(),
            energy: closed_energy(closed),
            q_n1: stability_q_n1(closed),
            c0: find_c0(p.a, p.b)?,
            flux_residual: boundary_flux_check(lower, c)?.residual,
            heinz_margin: heinz_margin(c, p.a, p.b)?,
        })
    }

    /// Quantities of the graph truncated at `c`. `q_n1` is the same closed
    /// form evaluated on `[0, c]`.
    pub fn for_truncated(curve: &ProfileCurve, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(DropError::InvalidParameter(format!(
                "truncation radius {c} must be > 0"
            )));
        }
        let w = window(curve, c)?;
        let p = *w.params();
        let vol = volume_integral(&w);
        let c0 = if p.is_degenerate() {
            f64::INFINITY
        } else {
            find_c0(p.a, p.b)?
        };
        Ok(Self {
            area: area(&w, c)?,
            volume: vol,
            height: w.last().u - p.u0,
            energy: energy(&w, c)?,
            q_n1: if p.a == 0.0 { 0.0 } else { -2.0 * p.a * vol },
            c0,
            flux_residual: boundary_flux_check(&w, c)?.residual,
            heinz_margin: heinz_margin(c, p.a, p.b)?,
        })
    }
}
