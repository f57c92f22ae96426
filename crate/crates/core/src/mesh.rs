//! Triangle meshes of revolved profiles.
//!
//! Rings are placed uniformly in arc length along the profile, each with
//! `n_theta` vertices; consecutive rings are offset by half an angular step
//! so the bands triangulate into near-isosceles triangles. The axis points
//! are single pole vertices closed by triangle fans.
//!
//! Mean curvature uses the cotangent Laplace-Beltrami operator with
//! circumcentric dual areas: `K(x_i) = (1 / 2A_i) sum_j (cot a_ij + cot b_ij)(x_i - x_j)`
//! is the discrete mean curvature normal `2H n`, so `H = |K| / 2`, positive
//! when `K` points along the outward normal (the sphere has `H > 0`).

use nalgebra::Vector3;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::analytic::DropParams;
use crate::error::{DropError, Result};
use crate::numeric::format_sig;
use crate::ode::{ClosedProfile, ProfileCurve, ProfileSample};

pub type Point = Vector3<f64>;

/// Smallest accepted azimuthal and profile counts.
pub const MIN_COUNT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct RevolveMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_loops: Vec<Vec<usize>>,
    /// Per-vertex target mean curvature `(a r^2 + b) / 2`.
    pub target_h: Vec<f64>,
    /// Axis vertices (one for an open cap, two for a closed drop).
    pub poles: Vec<usize>,
    pub params: DropParams,
    /// Copied from the closed profile; open caps are reported as embedded.
    pub embedded: bool,
}

fn check_counts(n_theta: usize, n_s: usize) -> Result<()> {
    if n_theta < MIN_COUNT || n_s < MIN_COUNT {
        return Err(DropError::InvalidParameter(format!(
            "mesh counts must be at least {MIN_COUNT} (n_theta = {n_theta}, n_s = {n_s})"
        )));
    }
    Ok(())
}

/// Ring samples at `s_k = k L / n_s`, `k = 1..=n_s`.
fn ring_samples(curve: &ProfileCurve, n_s: usize) -> Result<Vec<ProfileSample>> {
    let len = curve.length();
    if !(len > 0.0) {
        return Err(DropError::DegenerateMesh("profile has zero length".into()));
    }
    (1..=n_s)
        .map(|k| {
            if k == n_s {
                Ok(*curve.last())
            } else {
                curve.state_at_arclength(len * k as f64 / n_s as f64)
            }
        })
        .collect()
}

struct Builder {
    n_theta: usize,
    params: DropParams,
    vertices: Vec<Point>,
    target_h: Vec<f64>,
    triangles: Vec<[usize; 3]>,
}

impl Builder {
    fn new(n_theta: usize, params: DropParams) -> Self {
        Self {
            n_theta,
            params,
            vertices: Vec::new(),
            target_h: Vec::new(),
            triangles: Vec::new(),
        }
    }

    fn push(&mut self, p: Point) -> usize {
        let r2 = p.x * p.x + p.y * p.y;
        self.vertices.push(p);
        self.target_h.push(0.5 * (self.params.a * r2 + self.params.b));
        self.vertices.len() - 1
    }

    fn pole(&mut self, u: f64) -> usize {
        self.push(Point::new(0.0, 0.0, u))
    }

    /// Ring number `k` (its parity sets the half-step offset).
    fn ring(&mut self, k: usize, r: f64, u: f64) -> usize {
        let start = self.vertices.len();
        let offset = if k % 2 == 1 { 0.5 } else { 0.0 };
        for j in 0..self.n_theta {
            let theta = 2.0 * PI * (j as f64 + offset) / self.n_theta as f64;
            self.push(Point::new(r * theta.cos(), r * theta.sin(), u));
        }
        start
    }

    /// Triangles between consecutive rings, lower ring `lo` with offset
    /// `lo_odd`. Winding makes `(theta direction) x (s direction)` the normal.
    fn band(&mut self, lo: usize, hi: usize, lo_odd: bool) {
        let n = self.n_theta;
        for j in 0..n {
            let l0 = lo + j;
            let l1 = lo + (j + 1) % n;
            if lo_odd {
                // Lower vertex j sits halfway between upper j and j + 1.
                let u0 = hi + (j + 1) % n;
                let um = hi + j;
                self.triangles.push([um, l0, u0]);
                self.triangles.push([l0, l1, u0]);
            } else {
                // Upper vertex j sits halfway between lower j and j + 1.
                let u0 = hi + j;
                let un = hi + (j + 1) % n;
                self.triangles.push([l0, l1, u0]);
                self.triangles.push([l1, un, u0]);
            }
        }
    }

    fn fan_bottom(&mut self, pole: usize, ring: usize) {
        let n = self.n_theta;
        for j in 0..n {
            self.triangles.push([pole, ring + (j + 1) % n, ring + j]);
        }
    }

    fn fan_top(&mut self, ring: usize, pole: usize) {
        let n = self.n_theta;
        for j in 0..n {
            self.triangles.push([ring + j, ring + (j + 1) % n, pole]);
        }
    }
}

/// Revolves an open profile into a cap with one boundary loop at `c_end`.
pub fn revolve(curve: &ProfileCurve, n_theta: usize, n_s: usize) -> Result<RevolveMesh> {
    check_counts(n_theta, n_s)?;
    let rings = ring_samples(curve, n_s)?;
    let mut b = Builder::new(n_theta, *curve.params());
    let pole = b.pole(curve.first().u);
    let mut prev = None;
    for (k, x) in rings.iter().enumerate() {
        let start = b.ring(k + 1, x.r, x.u);
        match prev {
            None => b.fan_bottom(pole, start),
            Some(p) => b.band(p, start, k % 2 == 1),
        }
        prev = Some(start);
    }
    let last = prev.expect("at least one ring");
    let boundary: Vec<usize> = (last..last + n_theta).collect();
    Ok(RevolveMesh {
        vertices: b.vertices,
        triangles: b.triangles,
        boundary_loops: vec![boundary],
        target_h: b.target_h,
        poles: vec![pole],
        params: *curve.params(),
        embedded: true,
    })
}

/// Revolves a closed drop: `n_s` rings on the lower half up to the mirror
/// plane, `n_s - 1` mirrored rings and a top pole. The result is watertight.
pub fn revolve_closed(closed: &ClosedProfile, n_theta: usize, n_s: usize) -> Result<RevolveMesh> {
    check_counts(n_theta, n_s)?;
    let lower = closed.lower();
    let rings = ring_samples(lower, n_s)?;
    let m = closed.mirror_height();
    let mut b = Builder::new(n_theta, *lower.params());
    let bottom = b.pole(lower.first().u);
    let mut heights: Vec<(f64, f64)> = rings.iter().map(|x| (x.r, x.u)).collect();
    heights.extend(rings[..n_s - 1].iter().rev().map(|x| (x.r, 2.0 * m - x.u)));
    let mut prev = None;
    for (k, &(r, u)) in heights.iter().enumerate() {
        let start = b.ring(k + 1, r, u);
        match prev {
            None => b.fan_bottom(bottom, start),
            Some(p) => b.band(p, start, k % 2 == 1),
        }
        prev = Some(start);
    }
    let top = b.pole(2.0 * m - lower.first().u);
    b.fan_top(prev.expect("at least one ring"), top);
    Ok(RevolveMesh {
        vertices: b.vertices,
        triangles: b.triangles,
        boundary_loops: Vec::new(),
        target_h: b.target_h,
        poles: vec![bottom, top],
        params: *lower.params(),
        embedded: closed.is_embedded(),
    })
}

impl RevolveMesh {
    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut edges = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (i, j) = (t[k], t[(k + 1) % 3]);
                *edges.entry((i.min(j), i.max(j))).or_insert(0) += 1;
            }
        }
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.edge_counts().len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    /// Every edge borders one or two triangles.
    pub fn is_manifold(&self) -> bool {
        self.edge_counts().values().all(|&n| n == 1 || n == 2)
    }

    fn corners(&self, t: &[usize; 3]) -> (Point, Point, Point) {
        (self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]])
    }

    /// Sum of triangle areas.
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let (p0, p1, p2) = self.corners(t);
                0.5 * (p1 - p0).cross(&(p2 - p0)).norm()
            })
            .sum()
    }

    /// Signed volume by the divergence theorem; positive for outward winding.
    /// Only meaningful on closed meshes.
    pub fn enclosed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let (p0, p1, p2) = self.corners(t);
                p0.dot(&p1.cross(&p2)) / 6.0
            })
            .sum()
    }

    fn on_boundary(&self) -> Vec<bool> {
        let mut flag = vec![false; self.vertices.len()];
        for l in &self.boundary_loops {
            for &i in l {
                flag[i] = true;
            }
        }
        flag
    }

    /// Writes the mesh as Wavefront OBJ and returns the byte count.
    pub fn write_obj<W: Write>(&self, out: W) -> std::io::Result<usize> {
        let mut out = CountingWriter { inner: out, bytes: 0 };
        for v in &self.vertices {
            writeln!(
                out,
                "v {} {} {}",
                format_sig(v.x, 9),
                format_sig(v.y, 9),
                format_sig(v.z, 9)
            )?;
        }
        for t in &self.triangles {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        out.flush()?;
        Ok(out.bytes)
    }
}

struct CountingWriter<W> {
    inner: W,
    bytes: usize,
}

impl<W: Write> Write for CountingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n;
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Writes `mesh` to `path` as OBJ.
pub fn export_obj(mesh: &RevolveMesh, path: impl AsRef<Path>) -> Result<usize> {
    let file = File::create(path.as_ref())?;
    Ok(mesh.write_obj(BufWriter::new(file))?)
}

fn cot(at: Point, p: Point, q: Point) -> f64 {
    let u = p - at;
    let v = q - at;
    u.dot(&v) / u.cross(&v).norm()
}

/// Discrete mean curvature per vertex; `None` on boundary vertices.
///
/// Fails on zero-area triangles.
pub fn discrete_mean_curvature(mesh: &RevolveMesh) -> Result<Vec<Option<f64>>> {
    let n = mesh.vertices.len();
    let mut lap = vec![Point::zeros(); n];
    let mut normal = vec![Point::zeros(); n];
    let mut area = vec![0.0; n];
    let boundary = mesh.on_boundary();
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let p = [mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]];
        let face = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let twice_area = face.norm();
        if !(twice_area > 0.0) {
            return Err(DropError::DegenerateMesh(format!("triangle {ti} has zero area")));
        }
        let cots = [cot(p[0], p[1], p[2]), cot(p[1], p[2], p[0]), cot(p[2], p[0], p[1])];
        for k in 0..3 {
            let (i, j, l) = (k, (k + 1) % 3, (k + 2) % 3);
            // Edge opposite corner l joins i and j.
            let w = cots[l];
            lap[t[i]] += w * (p[i] - p[j]);
            lap[t[j]] += w * (p[j] - p[i]);
            normal[t[i]] += face;
        }
        // Circumcentric (Voronoi) area; stays consistent on the obtuse
        // triangles that wide rings produce.
        for k in 0..3 {
            let (j, l) = ((k + 1) % 3, (k + 2) % 3);
            area[t[k]] += ((p[k] - p[l]).norm_squared() * cots[j] + (p[k] - p[j]).norm_squared() * cots[l]) / 8.0;
        }
    }
    Ok((0..n)
        .map(|i| {
            if boundary[i] {
                return None;
            }
            let k = lap[i] / (2.0 * area[i]);
            let h = 0.5 * k.norm();
            // K = 2H n with n outward for H > 0 on the sphere.
            Some(if k.dot(&normal[i]) >= 0.0 { h } else { -h })
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplaceResidual {
    pub max: f64,
    pub mean: f64,
    pub n_interior: usize,
    #[serde(skip)]
    pub field: Vec<Option<f64>>,
}

/// `|2H - (a r^2 + b)|` at interior vertices; poles and boundary excluded
/// from the summary.
pub fn laplace_residual(mesh: &RevolveMesh) -> Result<LaplaceResidual> {
    let h = discrete_mean_curvature(mesh)?;
    let field: Vec<Option<f64>> = h
        .iter()
        .zip(&mesh.target_h)
        .map(|(h, t)| h.map(|h| (2.0 * h - 2.0 * t).abs()))
        .collect();
    let mut max = 0.0f64;
    let mut sum = 0.0;
    let mut count = 0;
    for (i, v) in field.iter().enumerate() {
        if mesh.poles.contains(&i) {
            continue;
        }
        if let Some(v) = v {
            max = max.max(*v);
            sum += v;
            count += 1;
        }
    }
    Ok(LaplaceResidual {
        max,
        mean: if count > 0 { sum / count as f64 } else { 0.0 },
        n_interior: count,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{close_profile, solve_profile, StepControl, StopCondition};

    fn closed(a: f64, b: f64) -> ClosedProfile {
        let c = solve_profile(
            DropParams::new(a, b, 0.0),
            StopCondition::VerticalTangent,
            StepControl::default(),
        )
        .unwrap();
        close_profile(c).unwrap()
    }

    #[test]
    fn closed_sphere_topology() {
        let m = revolve_closed(&closed(0.0, 1.0), 64, 64).unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        assert!(m.is_manifold() && m.is_closed());
        assert_eq!(m.vertices.len(), 64 * 127 + 2);
        assert!(m.enclosed_volume() > 0.0);
    }

    #[test]
    fn open_cap_boundary() {
        let c = solve_profile(
            DropParams::new(1.0, 1.0, 0.0),
            StopCondition::Radius(0.8),
            StepControl::default(),
        )
        .unwrap();
        let m = revolve(&c, 32, 16).unwrap();
        assert_eq!(m.boundary_loops.len(), 1);
        assert_eq!(m.boundary_loops[0].len(), 32);
        assert_eq!(m.euler_characteristic(), 1);
        assert!(m.vertices.iter().all(|v| (v.x * v.x + v.y * v.y).sqrt() <= 0.8 + 1e-12));
    }

    #[test]
    fn rejects_small_counts() {
        assert!(revolve_closed(&closed(0.0, 1.0), 4, 64).is_err());
    }

    #[test]
    fn sphere_curvature() {
        let m = revolve_closed(&closed(0.0, 1.0), 64, 64).unwrap();
        let res = laplace_residual(&m).unwrap();
        assert!(res.max <= 1e-2, "{}", res.max);
        let h = discrete_mean_curvature(&m).unwrap();
        assert!(h.iter().flatten().all(|h| (h - 0.5).abs() < 5e-3));
    }

    #[test]
    fn flat_disk_is_minimal() {
        let c = solve_profile(
            DropParams::new(0.0, 0.0, 0.0),
            StopCondition::Radius(1.0),
            StepControl::default(),
        )
        .unwrap();
        let m = revolve(&c, 16, 16).unwrap();
        let h = discrete_mean_curvature(&m).unwrap();
        assert!(h.iter().flatten().all(|h| h.abs() < 1e-9));
    }

    #[test]
    fn target_on_axis() {
        let m = revolve_closed(&closed(1.0, 1.0), 16, 16).unwrap();
        for &p in &m.poles {
            assert_eq!(2.0 * m.target_h[p], 1.0);
        }
    }

    #[test]
    fn obj_round_trip() {
        let m = revolve_closed(&closed(0.0, 1.0), 16, 16).unwrap();
        let mut buf = Vec::new();
        let n = m.write_obj(&mut buf).unwrap();
        assert_eq!(n, buf.len());
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), m.vertices.len());
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), m.triangles.len());
        assert!(text.ends_with('\n'));
        assert!(export_obj(&m, "").is_err());
    }

    #[test]
    fn non_embedded_drop_still_meshes() {
        let m = revolve_closed(&closed(-1.0, 2.0), 16, 32).unwrap();
        assert!(!m.embedded);
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn second_order_on_sphere() {
        let cp = closed(0.0, 1.0);
        let e: Vec<f64> = [32, 64]
            .iter()
            .map(|&n| laplace_residual(&revolve_closed(&cp, n, n).unwrap()).unwrap().max)
            .collect();
        assert!(e[0] / e[1] > 3.0, "{e:?}");
    }
}
