//! Profile integration in arc length and mirror closure.
//!
//! The generating curve is integrated as
//!
//! ```text
//! dr/ds = cos psi,   du/ds = sin psi,   dpsi/ds = kappa(r) = (3 a r^2 + 2b) / 4
//! ```
//!
//! from `r = 0, u = u0, psi = 0`. In these variables the system is smooth at
//! the axis and through the vertical tangent at `c0`, so a fixed-step RK4
//! march followed by a root find on the stopping event is enough.
//!
//! A solve runs in two passes. The first marches with the requested step
//! until the event (`psi = +-pi/2` or `r = r_max`) is bracketed and then
//! locates it inside the last step. The second re-integrates `[0, s_end]`
//! with the largest step not exceeding the requested one that divides the
//! interval into a multiple of `samples - 1`, and records every sample.
//! Samples are therefore uniform in `s` and the last one sits on the event.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use serde::Serialize;

use crate::analytic::{at_type_ii_threshold, classify, profile_curvature, sin_psi, DropParams, SurfaceType};
use crate::error::{DropError, Result};
use crate::numeric::format_sig;

/// Relative distance from the end radius within which a requested radius is
/// taken to be the end radius. Near a vertical tangent `r(s)` is flat, so
/// rounding in `c0` would otherwise move `u(c0)` by `O(sqrt(eps))`.
pub const RADIUS_SNAP: f64 = 1e-12;

/// Where to stop the profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopCondition {
    /// At the vertical tangent `|psi| = pi/2` (the maximal radius `c0`).
    VerticalTangent,
    /// At `r = r_max`, or earlier if the vertical tangent comes first.
    Radius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    /// Base RK4 step in arc length.
    pub step: f64,
    /// Arc-length tolerance for locating the stopping event.
    pub tolerance: f64,
    /// Number of stored samples, endpoints included.
    pub samples: usize,
    /// Upper bound on first-pass steps before giving up with `StepLimit`.
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            step: 1e-4,
            tolerance: 1e-10,
            samples: 2048,
            max_steps: 2_000_000,
        }
    }
}

impl StepControl {
    pub fn with_step(self, step: f64) -> Self {
        Self { step, ..self }
    }

    pub fn with_samples(self, samples: usize) -> Self {
        Self { samples, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(DropError::InvalidParameter(format!("step {} must be > 0", self.step)));
        }
        if !(self.tolerance > 0.0) {
            return Err(DropError::InvalidParameter(format!(
                "event tolerance {} must be > 0",
                self.tolerance
            )));
        }
        if self.samples < 2 {
            return Err(DropError::InvalidParameter(format!(
                "need at least 2 samples, got {}",
                self.samples
            )));
        }
        if self.max_steps == 0 {
            return Err(DropError::InvalidParameter("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    VerticalTangent,
    RadiusReached,
    StepLimit,
}

/// One point of the generating curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub s: f64,
    pub r: f64,
    pub u: f64,
    pub psi: f64,
}

type State = [f64; 3];

impl ProfileSample {
    fn state(&self) -> State {
        [self.r, self.u, self.psi]
    }

    fn from_state(s: f64, y: State) -> Self {
        Self {
            s,
            r: y[0],
            u: y[1],
            psi: y[2],
        }
    }
}

/// Arc-length sampled solution of the profile equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    samples: Vec<ProfileSample>,
    params: DropParams,
    c_end: f64,
    stop_reason: StopReason,
    surface_type: Option<SurfaceType>,
    control: StepControl,
}

fn rhs(y: &State, p: &DropParams) -> State {
    let (sin, cos) = y[2].sin_cos();
    [cos, sin, profile_curvature(y[0], p)]
}

fn rk4(y: &State, h: f64, p: &DropParams) -> State {
    let add = |y: &State, k: &State, c: f64| [y[0] + c * k[0], y[1] + c * k[1], y[2] + c * k[2]];
    let k1 = rhs(y, p);
    let k2 = rhs(&add(y, &k1, 0.5 * h), p);
    let k3 = rhs(&add(y, &k2, 0.5 * h), p);
    let k4 = rhs(&add(y, &k3, h), p);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        y[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// Advances `y` by `len` using equal substeps no longer than `max_step`.
fn advance(y: &State, len: f64, max_step: f64, p: &DropParams) -> State {
    if len == 0.0 {
        return *y;
    }
    let n = (len / max_step).ceil().max(1.0) as usize;
    let h = len / n as f64;
    let mut y = *y;
    for _ in 0..n {
        y = rk4(&y, h, p);
    }
    y
}

/// Signed event functions; the event fires when any becomes <= 0.
fn event_values(y: &State, stop: StopCondition) -> [f64; 3] {
    let radius = match stop {
        StopCondition::Radius(r_max) => r_max - y[0],
        StopCondition::VerticalTangent => f64::INFINITY,
    };
    [FRAC_PI_2 - y[2], y[2] + FRAC_PI_2, radius]
}

fn fired(values: &[f64; 3]) -> Option<usize> {
    values.iter().position(|v| *v <= 0.0)
}

/// Solves the profile of `p` up to `stop`.
///
/// `p` must be canonical (`b >= 0`) with `d = 0`. The degenerate `a = b = 0`
/// case is accepted for radius stops (it is the flat disk) and has no
/// surface type. Running out of steps is not an error: the partial curve is
/// returned with [`StopReason::StepLimit`].
pub fn solve_profile(p: DropParams, stop: StopCondition, control: StepControl) -> Result<ProfileCurve> {
    p.validate_finite()?;
    p.require_axis_profile()?;
    control.validate()?;
    if !p.is_canonical() {
        return Err(DropError::InvalidParameter(format!(
            "parameters (a = {}, b = {}) are not canonical; flip signs so that b >= 0",
            p.a, p.b
        )));
    }
    if let StopCondition::Radius(r_max) = stop {
        if !(r_max >= 0.0 && r_max.is_finite()) {
            return Err(DropError::InvalidParameter(format!("stop radius {r_max} must be >= 0")));
        }
    }
    let surface_type = if p.is_degenerate() {
        None
    } else {
        Some(classify(p.a, p.b)?)
    };

    let origin = ProfileSample {
        s: 0.0,
        r: 0.0,
        u: p.u0,
        psi: 0.0,
    };
    if stop == StopCondition::Radius(0.0) {
        return Ok(ProfileCurve {
            samples: vec![origin],
            params: p,
            c_end: 0.0,
            stop_reason: StopReason::RadiusReached,
            surface_type,
            control,
        });
    }

    // Pass 1: march and bracket the event.
    let h = control.step;
    let mut y = origin.state();
    let mut s = 0.0;
    let mut outcome = None;
    for _ in 0..control.max_steps {
        let next = rk4(&y, h, &p);
        if let Some(which) = fired(&event_values(&next, stop)) {
            let sigma = locate_event(&y, h, which, stop, &p, control.tolerance);
            outcome = Some((s + sigma, which));
            break;
        }
        y = next;
        s += h;
    }

    let (s_end, stop_reason) = match outcome {
        Some((s_end, 2)) => (s_end, StopReason::RadiusReached),
        Some((s_end, _)) => (s_end, StopReason::VerticalTangent),
        None => (s, StopReason::StepLimit),
    };

    // Pass 2: uniform resampling of [0, s_end].
    let intervals = control.samples - 1;
    let per_sample = (s_end / (intervals as f64 * h)).ceil().max(1.0) as usize;
    let dh = s_end / (intervals * per_sample) as f64;
    let mut samples = Vec::with_capacity(control.samples);
    samples.push(origin);
    let mut y = origin.state();
    for k in 1..=intervals {
        for _ in 0..per_sample {
            y = rk4(&y, dh, &p);
        }
        let sk = if k == intervals {
            s_end
        } else {
            (k * per_sample) as f64 * dh
        };
        samples.push(ProfileSample::from_state(sk, y));
    }

    let c_end = match (stop_reason, stop) {
        // The event leaves r within rounding of r_max; report the requested radius.
        (StopReason::RadiusReached, StopCondition::Radius(r_max)) => r_max,
        _ => samples.last().map(|x| x.r).unwrap_or(0.0),
    };
    Ok(ProfileCurve {
        samples,
        params: p,
        c_end,
        stop_reason,
        surface_type,
        control,
    })
}

/// Finds `sigma` in `(0, h]` where event `which` crosses zero on the RK4 step
/// from `y`, by bisection down to `tol` (and then to rounding).
fn locate_event(y: &State, h: f64, which: usize, stop: StopCondition, p: &DropParams, tol: f64) -> f64 {
    let g = |sigma: f64| event_values(&rk4(y, sigma, p), stop)[which];
    let (mut lo, mut hi) = (0.0, h);
    // Keep going past `tol` while the bracket still shrinks; the event
    // functions are smooth in sigma so this costs a handful of steps.
    let floor = (tol * 1e-4).max(f64::EPSILON * h);
    while hi - lo > floor {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Take the side that sits closest to the event surface.
    if g(lo).abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

impl ProfileCurve {
    pub fn samples(&self) -> &[ProfileSample] {
        &self.samples
    }

    pub fn params(&self) -> &DropParams {
        &self.params
    }

    /// Final radius reached by the curve.
    pub fn c_end(&self) -> f64 {
        self.c_end
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop_reason
    }

    pub fn surface_type(&self) -> Option<SurfaceType> {
        self.surface_type
    }

    pub fn control(&self) -> &StepControl {
        &self.control
    }

    pub fn first(&self) -> &ProfileSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &ProfileSample {
        self.samples.last().expect("curve has at least one sample")
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        self.last().s
    }

    /// Uniform arc-length spacing between consecutive samples.
    pub fn sample_spacing(&self) -> f64 {
        if self.samples.len() < 2 {
            0.0
        } else {
            self.length() / (self.samples.len() - 1) as f64
        }
    }

    /// State at arc length `s`, re-integrated from the preceding sample.
    pub fn state_at_arclength(&self, s: f64) -> Result<ProfileSample> {
        let len = self.length();
        if !(s >= 0.0 && s <= len) {
            return Err(DropError::OutOfRange {
                requested: s,
                limit: len,
            });
        }
        if s == len {
            return Ok(*self.last());
        }
        let ds = self.sample_spacing();
        let k = ((s / ds).floor() as usize).min(self.samples.len() - 2);
        let base = &self.samples[k];
        let y = advance(&base.state(), s - base.s, self.control.step, &self.params);
        Ok(ProfileSample::from_state(s, y))
    }

    /// Maps a requested radius onto `[0, c_end]`, treating values within
    /// [`RADIUS_SNAP`] (relative) of `c_end` as the end point itself.
    pub fn resolve_radius(&self, r: f64) -> Result<f64> {
        let slack = RADIUS_SNAP * self.c_end.max(1.0);
        if !(r >= 0.0) || r > self.c_end + slack {
            return Err(DropError::OutOfRange {
                requested: r,
                limit: self.c_end,
            });
        }
        Ok(if (r - self.c_end).abs() <= slack { self.c_end } else { r })
    }

    /// State where the curve passes radius `r` (`0 <= r <= c_end`).
    pub fn state_at_radius(&self, r: f64) -> Result<ProfileSample> {
        let r = self.resolve_radius(r)?;
        if r == self.c_end {
            return Ok(*self.last());
        }
        // r is strictly increasing along the samples.
        let k = self.samples.partition_point(|x| x.r <= r).saturating_sub(1);
        let base = self.samples[k];
        if base.r == r {
            return Ok(base);
        }
        let next = self.samples[k + 1];
        let y0 = base.state();
        let step = self.control.step;
        let (mut lo, mut hi) = (0.0, next.s - base.s);
        while hi - lo > f64::EPSILON * next.s.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if advance(&y0, mid, step, &self.params)[0] < r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = advance(&y0, hi, step, &self.params);
        Ok(ProfileSample::from_state(base.s + hi, y))
    }

    /// Height `u` at radius `r`.
    pub fn u_at(&self, r: f64) -> Result<f64> {
        Ok(self.state_at_radius(r)?.u)
    }

    /// The same profile re-solved up to radius `c`, with the same step
    /// control. Returns a clone when `c` is the current end radius.
    pub fn truncated(&self, c: f64) -> Result<ProfileCurve> {
        let c = self.resolve_radius(c)?;
        if c == self.c_end {
            return Ok(self.clone());
        }
        solve_profile(self.params, StopCondition::Radius(c), self.control)
    }

    /// Writes the samples as `s,r,u,psi` CSV with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "s,r,u,psi")?;
        for x in &self.samples {
            writeln!(
                out,
                "{},{},{},{}",
                format_sig(x.s, 17),
                format_sig(x.r, 17),
                format_sig(x.u, 17),
                format_sig(x.psi, 17)
            )?;
        }
        Ok(())
    }
}

/// Largest `|sin psi - f(r)|` over the samples: conservation of the first
/// integral, used as the integration quality metric.
pub fn profile_residual(curve: &ProfileCurve) -> f64 {
    let p = curve.params();
    curve
        .samples()
        .iter()
        .map(|x| (x.psi.sin() - sin_psi(x.r, p.a, p.b)).abs())
        .fold(0.0, f64::max)
}

/// Closed drop: the profile on `[0, c0]` plus its mirror image in the plane
/// `x3 = u(c0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedProfile {
    lower: ProfileCurve,
    mirror_height: f64,
    embedded: bool,
    embedded_by_criterion: bool,
}

/// Closes a profile that ended at its vertical tangent.
///
/// Embeddedness is decided geometrically: the lower polyline and its mirror
/// image are swept for crossings (the shared point on the mirror plane
/// excluded). The textbook criterion, self-intersection iff `u0 <= u(c0)`
/// for Type IIb, is evaluated alongside so both can be compared.
pub fn close_profile(curve: ProfileCurve) -> Result<ClosedProfile> {
    if curve.stop_reason() != StopReason::VerticalTangent {
        return Err(DropError::NotClosed(format!(
            "profile stopped with {:?} at r = {}",
            curve.stop_reason(),
            curve.c_end()
        )));
    }
    let p = curve.params();
    if at_type_ii_threshold(p.a, p.b) {
        return Err(DropError::NotClosed(format!(
            "(a = {}, b = {}) lies on the Type IIa/IIb threshold; the profile only approaches r = c0 asymptotically",
            p.a, p.b
        )));
    }
    let mirror_height = curve.last().u;
    let lower: Vec<(f64, f64)> = curve.samples().iter().map(|x| (x.r, x.u)).collect();
    let upper: Vec<(f64, f64)> = lower.iter().map(|&(r, u)| (r, 2.0 * mirror_height - u)).collect();
    let embedded = !polylines_cross(&lower, &upper);
    let embedded_by_criterion = match curve.surface_type() {
        Some(SurfaceType::TypeIIb) => curve.params().u0 > mirror_height,
        _ => true,
    };
    Ok(ClosedProfile {
        lower: curve,
        mirror_height,
        embedded,
        embedded_by_criterion,
    })
}

impl ClosedProfile {
    pub fn lower(&self) -> &ProfileCurve {
        &self.lower
    }

    pub fn mirror_height(&self) -> f64 {
        self.mirror_height
    }

    pub fn c0(&self) -> f64 {
        self.lower.c_end()
    }

    /// Distance between the lowest and highest axis points, `2 (u(c0) - u0)`.
    pub fn total_height(&self) -> f64 {
        2.0 * (self.mirror_height - self.lower.params().u0)
    }

    /// Result of the segment-crossing sweep.
    pub fn is_embedded(&self) -> bool {
        self.embedded
    }

    /// Result of the closed-form criterion (`u0 > u(c0)` for Type IIb).
    pub fn embedded_by_criterion(&self) -> bool {
        self.embedded_by_criterion
    }

    /// Mirror of the lower samples, ordered from the mirror plane to the top pole.
    pub fn upper_samples(&self) -> Vec<ProfileSample> {
        let total = 2.0 * self.lower.length();
        self.lower
            .samples()
            .iter()
            .rev()
            .map(|x| ProfileSample {
                s: total - x.s,
                r: x.r,
                u: 2.0 * self.mirror_height - x.u,
                psi: std::f64::consts::PI - x.psi,
            })
            .collect()
    }
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_intersect(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Sweep over two polylines with non-decreasing first coordinate, testing
/// only segment pairs whose `r`-ranges overlap. The final segment pair,
/// which meets at the common closing point, is excluded.
fn polylines_cross(p: &[(f64, f64)], q: &[(f64, f64)]) -> bool {
    if p.len() < 2 || q.len() < 2 {
        return false;
    }
    let (np, nq) = (p.len() - 1, q.len() - 1);
    let mut start = 0;
    for i in 0..np {
        let (lo, hi) = (p[i].0, p[i + 1].0);
        while start < nq && q[start + 1].0 < lo {
            start += 1;
        }
        let mut j = start;
        while j < nq && q[j].0 <= hi {
            let closing = i == np - 1 && j == nq - 1;
            if !closing && segments_intersect(p[i], p[i + 1], q[j], q[j + 1]) {
                return true;
            }
            j += 1;
        }
    }
    false
}
