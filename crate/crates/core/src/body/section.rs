//! Perpendicular plane sections of a convex body: polar boundary samples,
//! area, centroid, second moments, perimeter and the arc-length-weighted
//! boundary centroid.

use std::io::{BufRead, Write};

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};
use crate::frames::{parse_f64_row, perpendicular_unit};
use crate::spectral::periodic_derivative;

use super::{ray_boundary_distance, ConvexBody};

/// An oriented plane with an in-plane coordinate system. {x1, x2, normal} is
/// right-handed: x1 x x2 = normal.
#[derive(Debug, Clone, Copy)]
pub struct SectionPlane {
    pub normal: Vector3<f64>,
    pub point: Point3<f64>,
    pub x1: Vector3<f64>,
    pub x2: Vector3<f64>,
}

impl SectionPlane {
    /// Plane from a unit normal and a point, with deterministic in-plane axes.
    pub fn new(normal: Vector3<f64>, point: Point3<f64>) -> Result<Self> {
        if (normal.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput("plane normal must be unit".into()));
        }
        let x1 = perpendicular_unit(&normal);
        let x2 = normal.cross(&x1);
        Ok(Self {
            normal,
            point,
            x1,
            x2,
        })
    }

    /// Plane with caller-chosen axes; {x1, x2, n} must be orthonormal and
    /// right-handed to 1e-10.
    pub fn with_axes(
        normal: Vector3<f64>,
        point: Point3<f64>,
        x1: Vector3<f64>,
        x2: Vector3<f64>,
    ) -> Result<Self> {
        let defect = (normal.norm() - 1.0)
            .abs()
            .max((x1.norm() - 1.0).abs())
            .max((x2.norm() - 1.0).abs())
            .max(x1.dot(&x2).abs())
            .max(x1.dot(&normal).abs())
            .max(x2.dot(&normal).abs())
            .max((x1.cross(&x2) - normal).norm());
        if defect > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "plane axes not right-handed orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            normal,
            point,
            x1,
            x2,
        })
    }

    /// In-plane coordinates of a 3D point relative to the plane reference.
    pub fn local(&self, p: &Point3<f64>) -> (f64, f64) {
        let d = p - self.point;
        (d.dot(&self.x1), d.dot(&self.x2))
    }

    /// Inverse of `local`.
    pub fn embed(&self, u: f64, v: f64) -> Point3<f64> {
        self.point + self.x1 * u + self.x2 * v
    }
}

/// One perpendicular cross-section: polar boundary samples about an interior
/// pole plus the derived integral quantities. Local (u, v) coordinates refer
/// to the plane's (x1, x2) axes at the plane's reference point.
#[derive(Debug, Clone)]
pub struct SectionProfile {
    pub plane: SectionPlane,
    pub pole: Point3<f64>,
    pub phi: Vec<f64>,
    pub r: Vec<f64>,
    pub area: f64,
    pub centroid: Point3<f64>,
    /// Area centroid in plane coordinates.
    pub local_centroid: (f64, f64),
    /// Second moments of area about the centroidal axes: iu = integral of
    /// v^2 dA, iv = integral of u^2 dA, iuv = integral of u*v dA.
    pub iu: f64,
    pub iv: f64,
    pub iuv: f64,
    pub perimeter: f64,
    /// Arc-length-weighted centroid of the boundary curve, plane coordinates.
    pub boundary_line_centroid: (f64, f64),
}

impl SectionProfile {
    pub fn empty(plane: SectionPlane) -> Self {
        Self {
            plane,
            pole: plane.point,
            phi: Vec::new(),
            r: Vec::new(),
            area: 0.0,
            centroid: plane.point,
            local_centroid: (0.0, 0.0),
            iu: 0.0,
            iv: 0.0,
            iuv: 0.0,
            perimeter: 0.0,
            boundary_line_centroid: (0.0, 0.0),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Boundary samples in plane coordinates.
    pub fn boundary_uv(&self) -> Vec<(f64, f64)> {
        let (pu, pv) = self.plane.local(&self.pole);
        self.phi
            .iter()
            .zip(&self.r)
            .map(|(&phi, &r)| (pu + r * phi.cos(), pv + r * phi.sin()))
            .collect()
    }

    /// CSV export: summary comment lines, then `phi,r,u,v` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "# area = {}", self.area)?;
        writeln!(
            out,
            "# centroid = {},{},{}",
            self.centroid.x, self.centroid.y, self.centroid.z
        )?;
        writeln!(
            out,
            "# local_centroid = {},{}",
            self.local_centroid.0, self.local_centroid.1
        )?;
        writeln!(out, "# iu = {}", self.iu)?;
        writeln!(out, "# iv = {}", self.iv)?;
        writeln!(out, "# iuv = {}", self.iuv)?;
        writeln!(out, "# perimeter = {}", self.perimeter)?;
        writeln!(
            out,
            "# boundary_line_centroid = {},{}",
            self.boundary_line_centroid.0, self.boundary_line_centroid.1
        )?;
        writeln!(out, "phi,r,u,v")?;
        for ((&phi, &r), (u, v)) in self.phi.iter().zip(&self.r).zip(self.boundary_uv()) {
            writeln!(out, "{phi},{r},{u},{v}")?;
        }
        Ok(())
    }

    /// Parse the rows of a profile CSV back into (phi, r, u, v) tuples.
    pub fn read_csv_rows<R: BufRead>(input: R) -> Result<Vec<(f64, f64, f64, f64)>> {
        let mut rows = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("phi") {
                continue;
            }
            let cols = parse_f64_row(line, 4, lineno + 1)?;
            rows.push((cols[0], cols[1], cols[2], cols[3]));
        }
        Ok(rows)
    }
}

/// Find an interior point of the section, or None for an empty or tangent
/// section. Candidates in order: the plane's own reference point, the exact
/// quadric section center when available, the projection of the interior
/// hint, then a fan of 32 in-plane probe directions around that projection.
fn find_pole(body: &ConvexBody, plane: &SectionPlane) -> Option<Point3<f64>> {
    let rb = body.bounding_radius();
    let dist = (plane.point - body.interior_hint()).dot(&plane.normal);
    if dist.abs() >= rb {
        return None;
    }

    if body.contains(&plane.point) {
        return Some(refine_pole(body, plane, plane.point));
    }
    if let Some(c) = body.section_center(&plane.normal, &plane.point) {
        if body.contains(&c) {
            return Some(refine_pole(body, plane, c));
        }
    }
    let proj = body.interior_hint() - plane.normal * dist;
    if body.contains(&proj) {
        return Some(refine_pole(body, plane, proj));
    }
    for k in 0..32 {
        let th = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
        let dir = plane.x1 * th.cos() + plane.x2 * th.sin();
        for step in 1..=64 {
            let cand = proj + dir * (rb * step as f64 / 64.0);
            if body.contains(&cand) {
                return Some(refine_pole(body, plane, cand));
            }
        }
    }
    None
}

/// Nudge a pole toward the middle of the section so the polar boundary
/// function stays well resolved. One or two cheap centering passes with a
/// coarse ray fan.
fn refine_pole(body: &ConvexBody, plane: &SectionPlane, mut pole: Point3<f64>) -> Point3<f64> {
    for _ in 0..2 {
        let m = 16;
        let mut min_r = f64::INFINITY;
        let mut max_r: f64 = 0.0;
        let mut sum = Vector3::zeros();
        for j in 0..m {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let dir = plane.x1 * phi.cos() + plane.x2 * phi.sin();
            let Ok(r) = ray_boundary_distance(body, &pole, &dir) else {
                return pole;
            };
            min_r = min_r.min(r);
            max_r = max_r.max(r);
            sum += dir * r;
        }
        if min_r > 0.2 * max_r {
            break;
        }
        let cand = pole + sum / m as f64;
        if !body.contains(&cand) {
            break;
        }
        pole = cand;
    }
    pole
}

/// Area of the cross-section in the plane through `point` perpendicular to
/// `normal`, by the polar rule with m rays. Returns 0 for empty sections.
pub fn section_area(
    body: &ConvexBody,
    normal: &Vector3<f64>,
    point: &Point3<f64>,
    m: usize,
) -> Result<f64> {
    let plane = SectionPlane::new(normal.normalize(), *point)?;
    let Some(pole) = find_pole(body, &plane) else {
        return Ok(0.0);
    };
    let mut acc = 0.0;
    for j in 0..m {
        let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let dir = plane.x1 * phi.cos() + plane.x2 * phi.sin();
        let r = ray_boundary_distance(body, &pole, &dir)?;
        acc += r * r;
    }
    Ok(std::f64::consts::PI * acc / m as f64)
}

/// Extract the full cross-section profile in the given plane with m polar
/// samples (m even, at least 16). Empty and tangent sections come back with
/// zero area rather than an error.
pub fn cross_section(body: &ConvexBody, plane: &SectionPlane, m: usize) -> Result<SectionProfile> {
    if m < 16 {
        return Err(Error::InvalidInput(format!(
            "cross-section needs at least 16 polar samples, got {m}"
        )));
    }
    if !m.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "cross-section sample count must be even, got {m}"
        )));
    }
    let Some(pole) = find_pole(body, plane) else {
        return Ok(SectionProfile::empty(*plane));
    };
    let mut phi = Vec::with_capacity(m);
    let mut r = Vec::with_capacity(m);
    for j in 0..m {
        let p = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let dir = plane.x1 * p.cos() + plane.x2 * p.sin();
        phi.push(p);
        r.push(ray_boundary_distance(body, &pole, &dir)?);
    }
    Ok(profile_from_polar(*plane, pole, phi, r))
}

/// Assemble a profile from polar boundary samples about an interior pole.
/// The periodic trapezoid rule is spectrally accurate for the smooth convex
/// boundaries this is used on; the perimeter integrand differentiates r(phi)
/// spectrally as well.
pub fn profile_from_polar(
    plane: SectionPlane,
    pole: Point3<f64>,
    phi: Vec<f64>,
    r: Vec<f64>,
) -> SectionProfile {
    let m = r.len();
    let dphi = 2.0 * std::f64::consts::PI / m as f64;

    let mut area = 0.0;
    let mut mu = 0.0; // integral of r^3 cos / 3
    let mut mv = 0.0;
    let mut iu_pole = 0.0; // integral of r^4 sin^2 / 4
    let mut iv_pole = 0.0;
    let mut iuv_pole = 0.0;
    for (p, rr) in phi.iter().zip(&r) {
        let (sin, cos) = p.sin_cos();
        let r2 = rr * rr;
        let r3 = r2 * rr;
        let r4 = r2 * r2;
        area += 0.5 * r2;
        mu += r3 / 3.0 * cos;
        mv += r3 / 3.0 * sin;
        iu_pole += 0.25 * r4 * sin * sin;
        iv_pole += 0.25 * r4 * cos * cos;
        iuv_pole += 0.25 * r4 * sin * cos;
    }
    area *= dphi;
    mu *= dphi;
    mv *= dphi;
    iu_pole *= dphi;
    iv_pole *= dphi;
    iuv_pole *= dphi;

    let c1 = mu / area;
    let c2 = mv / area;
    let centroid = pole + plane.x1 * c1 + plane.x2 * c2;

    // Shift the pole moments to the centroidal axes.
    let iu = iu_pole - area * c2 * c2;
    let iv = iv_pole - area * c1 * c1;
    let iuv = iuv_pole - area * c1 * c2;

    let rp = periodic_derivative(&r, 2.0 * std::f64::consts::PI);
    let mut perimeter = 0.0;
    let mut lu = 0.0;
    let mut lv = 0.0;
    for i in 0..m {
        let ds = (r[i] * r[i] + rp[i] * rp[i]).sqrt();
        let (sin, cos) = phi[i].sin_cos();
        perimeter += ds;
        lu += r[i] * cos * ds;
        lv += r[i] * sin * ds;
    }
    perimeter *= dphi;
    lu *= dphi;
    lv *= dphi;

    let (pu, pv) = plane.local(&pole);
    SectionProfile {
        plane,
        pole,
        phi,
        r,
        area,
        centroid,
        local_centroid: (pu + c1, pv + c2),
        iu,
        iv,
        iuv,
        perimeter,
        boundary_line_centroid: (pu + lu / perimeter, pv + lv / perimeter),
    }
}
