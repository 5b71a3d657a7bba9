//! Volume and centroid of a solid from its perpendicular cross-sections
//! along a framed curve.
//!
//! The slices live in the planes through gamma(s) perpendicular to T(s),
//! with in-plane coordinates (u, v) along (N, B). The volume of the swept
//! solid is the integral of
//!
//! ```text
//! A(s) * (1 - (u_bar(s) * kn(s) - v_bar(s) * kg(s)))
//! ```
//!
//! which requires the map (s, u, v) -> gamma + u N + v B to be a
//! diffeomorphism; the pointwise necessary condition u*kn - v*kg < 1 is
//! checked on every stored boundary sample. Global injectivity is not
//! verified here and remains the caller's responsibility.

use std::io::{BufRead, Write};

use nalgebra::{Point3, Vector3};

use crate::body::{cross_section, ConvexBody, SectionPlane};
use crate::error::{Error, Result};
use crate::frames::{parse_f64_row, Curvatures, Frame, Ribbon};
use crate::quad::{composite_nodes, Adaptive, GaussLegendre};

/// Per-slice data needed by the volume and centroid formulas: area, centroid
/// offset and second moments in the local frame, plus boundary samples for
/// the diffeomorphism check.
#[derive(Debug, Clone)]
pub struct SliceSection {
    pub area: f64,
    pub centroid_uv: (f64, f64),
    pub iu: f64,
    pub iv: f64,
    pub iuv: f64,
    pub perimeter: f64,
    pub line_centroid_uv: (f64, f64),
    pub boundary_uv: Vec<(f64, f64)>,
}

impl SliceSection {
    /// Rotate the slice in its plane by `angle` about the plane origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        let rot = |(u, v): (f64, f64)| (u * cos - v * sin, u * sin + v * cos);
        // Second-moment tensor [[iv, iuv], [iuv, iu]] transforms as R J R^T.
        let (iu, iv, iuv) = (self.iu, self.iv, self.iuv);
        let iv2 = cos * cos * iv - 2.0 * sin * cos * iuv + sin * sin * iu;
        let iu2 = sin * sin * iv + 2.0 * sin * cos * iuv + cos * cos * iu;
        let iuv2 = sin * cos * (iv - iu) + (cos * cos - sin * sin) * iuv;
        Self {
            area: self.area,
            centroid_uv: rot(self.centroid_uv),
            iu: iu2,
            iv: iv2,
            iuv: iuv2,
            perimeter: self.perimeter,
            line_centroid_uv: rot(self.line_centroid_uv),
            boundary_uv: self.boundary_uv.iter().map(|&p| rot(p)).collect(),
        }
    }

    /// Translate the slice in its plane.
    pub fn translated(&self, du: f64, dv: f64) -> Self {
        let mut out = self.clone();
        out.centroid_uv = (self.centroid_uv.0 + du, self.centroid_uv.1 + dv);
        out.line_centroid_uv = (self.line_centroid_uv.0 + du, self.line_centroid_uv.1 + dv);
        out.boundary_uv = self
            .boundary_uv
            .iter()
            .map(|&(u, v)| (u + du, v + dv))
            .collect();
        out
    }
}

/// One quadrature node of a slice series.
#[derive(Debug, Clone)]
pub struct SliceNode {
    pub s: f64,
    pub weight: f64,
    pub gamma: Point3<f64>,
    pub frame: Frame,
    pub curvatures: Curvatures,
    pub section: SliceSection,
}

/// Perpendicular cross-sections of a solid sampled at composite
/// Gauss-Legendre nodes along a ribbon.
#[derive(Debug, Clone)]
pub struct SliceSeries {
    nodes: Vec<SliceNode>,
    length: f64,
}

impl SliceSeries {
    /// Slice a convex body along a ribbon. Empty sections (the ribbon leaving
    /// the body) contribute zero area with a centroid pinned to the curve.
    pub fn from_body(
        body: &ConvexBody,
        ribbon: &Ribbon,
        panels: usize,
        gl_order: usize,
        m: usize,
    ) -> Result<Self> {
        Self::build(ribbon, panels, gl_order, |_, pt| {
            let plane = SectionPlane::with_axes(
                pt.frame.tangent,
                pt.point,
                pt.frame.normal,
                pt.frame.binormal,
            )?;
            let profile = cross_section(body, &plane, m)?;
            if profile.is_empty() {
                return Ok(SliceSection {
                    area: 0.0,
                    centroid_uv: (0.0, 0.0),
                    iu: 0.0,
                    iv: 0.0,
                    iuv: 0.0,
                    perimeter: 0.0,
                    line_centroid_uv: (0.0, 0.0),
                    boundary_uv: Vec::new(),
                });
            }
            Ok(SliceSection {
                area: profile.area,
                centroid_uv: profile.local_centroid,
                iu: profile.iu,
                iv: profile.iv,
                iuv: profile.iuv,
                perimeter: profile.perimeter,
                line_centroid_uv: profile.boundary_line_centroid,
                boundary_uv: profile.boundary_uv(),
            })
        })
    }

    /// Slice series from a caller-supplied section function (rigid profile
    /// copies, synthetic bodies, and the like).
    pub fn from_sections(
        ribbon: &Ribbon,
        panels: usize,
        gl_order: usize,
        f: impl Fn(f64) -> SliceSection,
    ) -> Result<Self> {
        Self::build(ribbon, panels, gl_order, |s, _| Ok(f(s)))
    }

    fn build(
        ribbon: &Ribbon,
        panels: usize,
        gl_order: usize,
        f: impl Fn(f64, &crate::frames::RibbonPoint) -> Result<SliceSection>,
    ) -> Result<Self> {
        if panels == 0 || gl_order == 0 {
            return Err(Error::InvalidInput(
                "slice series needs at least one panel and node".into(),
            ));
        }
        let rule = GaussLegendre::new(gl_order);
        let length = ribbon.length();
        let mut nodes = Vec::with_capacity(panels * gl_order);
        for (s, weight) in composite_nodes(&rule, 0.0, length, panels) {
            let pt = ribbon.eval(s);
            let section = f(s, &pt)?;
            nodes.push(SliceNode {
                s,
                weight,
                gamma: pt.point,
                frame: pt.frame,
                curvatures: pt.curvatures,
                section,
            });
        }
        Ok(Self { nodes, length })
    }

    pub fn nodes(&self) -> &[SliceNode] {
        &self.nodes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// CSV export: `s,A,u_bar,v_bar,kn,kg,Iu,Iv,Iuv,L` per node.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "s,A,u_bar,v_bar,kn,kg,Iu,Iv,Iuv,L")?;
        for n in &self.nodes {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                n.s,
                n.section.area,
                n.section.centroid_uv.0,
                n.section.centroid_uv.1,
                n.curvatures.kappa_n,
                n.curvatures.kappa_g,
                n.section.iu,
                n.section.iv,
                n.section.iuv,
                n.section.perimeter,
            )?;
        }
        Ok(())
    }

    /// Parse rows written by `write_csv`.
    pub fn read_csv_rows<R: BufRead>(input: R) -> Result<Vec<[f64; 10]>> {
        let mut rows = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('s') {
                continue;
            }
            let cols = parse_f64_row(line, 10, lineno + 1)?;
            rows.push(cols.try_into().expect("checked length"));
        }
        Ok(rows)
    }
}

/// Result of the pointwise Jacobian-positivity check.
#[derive(Debug, Clone)]
pub struct DiffeoReport {
    pub ok: bool,
    /// Smallest value of 1 - u*kn + v*kg over all boundary samples.
    pub min_margin: f64,
    /// Location (s, u, v) of the minimum.
    pub worst: (f64, f64, f64),
}

/// Evaluate 1 - u*kn + v*kg at every boundary sample of every slice. This is
/// the necessary pointwise condition for the slicing map to be an
/// orientation-preserving diffeomorphism; it does not verify injectivity.
pub fn check_diffeo(series: &SliceSeries) -> DiffeoReport {
    let mut min_margin = f64::INFINITY;
    let mut worst = (0.0, 0.0, 0.0);
    for node in &series.nodes {
        let kn = node.curvatures.kappa_n;
        let kg = node.curvatures.kappa_g;
        for &(u, v) in &node.section.boundary_uv {
            let margin = 1.0 - u * kn + v * kg;
            if margin < min_margin {
                min_margin = margin;
                worst = (node.s, u, v);
            }
        }
        // Slices with no boundary samples (empty sections) impose nothing.
    }
    if min_margin == f64::INFINITY {
        min_margin = 1.0;
    }
    DiffeoReport {
        ok: min_margin > 0.0,
        min_margin,
        worst,
    }
}

fn require_diffeo(series: &SliceSeries) -> Result<()> {
    let report = check_diffeo(series);
    if !report.ok {
        return Err(Error::DiffeoViolated {
            s: report.worst.0,
            u: report.worst.1,
            v: report.worst.2,
            margin: report.min_margin,
        });
    }
    Ok(())
}

/// Volume by the slice formula: integral of
/// A(s) * (1 - (u_bar*kn - v_bar*kg)) ds.
pub fn pappus_volume(series: &SliceSeries) -> Result<f64> {
    require_diffeo(series)?;
    Ok(series
        .nodes
        .iter()
        .map(|n| n.weight * pappus_integrand(n))
        .sum())
}

pub(crate) fn pappus_integrand(n: &SliceNode) -> f64 {
    let (ub, vb) = n.section.centroid_uv;
    n.section.area * (1.0 - (ub * n.curvatures.kappa_n - vb * n.curvatures.kappa_g))
}

/// Volume of a solid along one of its centroid curves: the plain integral of
/// the cross-section area. The caller asserts the centroid property.
pub fn centroid_curve_volume(
    ribbon: &Ribbon,
    area: impl Fn(f64) -> f64,
    rel_tol: f64,
) -> Result<f64> {
    let quad = Adaptive {
        rel_tol,
        abs_scale: ribbon.length().powi(3).max(1e-12),
        max_depth: 48,
    };
    quad.integrate(0.0, ribbon.length(), area)
}

/// Body centroid from slices along a centroid curve:
///
/// ```text
/// c(K) * vol = integral of A*gamma - Iv*kn*N + Iu*kg*B + Iuv*(kg*N - kn*B) ds
/// ```
///
/// The cross-moment terms are always included; they vanish for symmetric
/// sections. Errors if any slice centroid strays from the curve.
pub fn body_centroid_along_ribbon(series: &SliceSeries) -> Result<Point3<f64>> {
    require_diffeo(series)?;
    let tol_factor = 1e-6;
    for n in &series.nodes {
        if n.section.area <= 0.0 {
            continue;
        }
        let (ub, vb) = n.section.centroid_uv;
        let offset = (ub * ub + vb * vb).sqrt();
        let tol = tol_factor * n.section.area.sqrt();
        if offset > tol {
            return Err(Error::NotCentroidCurve {
                s: n.s,
                offset,
                tol,
            });
        }
    }
    let volume = pappus_volume(series)?;
    let mut moment = Vector3::zeros();
    for n in &series.nodes {
        let kn = n.curvatures.kappa_n;
        let kg = n.curvatures.kappa_g;
        let sec = &n.section;
        let integrand = n.gamma.coords * sec.area - n.frame.normal * (sec.iv * kn)
            + n.frame.binormal * (sec.iu * kg)
            + (n.frame.normal * kg - n.frame.binormal * kn) * sec.iuv;
        moment += integrand * n.weight;
    }
    Ok(Point3::from(moment / volume))
}

/// Disk of radius `r` as a slice section centered on the curve.
pub fn disk_section(r: f64, m: usize) -> SliceSection {
    ellipse_section(r, r, m)
}

/// Axis-aligned ellipse slice with semi-axes (a, b) centered on the curve.
pub fn ellipse_section(a: f64, b: f64, m: usize) -> SliceSection {
    let boundary = (0..m)
        .map(|j| {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            (a * phi.cos(), b * phi.sin())
        })
        .collect();
    SliceSection {
        area: std::f64::consts::PI * a * b,
        centroid_uv: (0.0, 0.0),
        iu: std::f64::consts::PI * a * b.powi(3) / 4.0,
        iv: std::f64::consts::PI * a.powi(3) * b / 4.0,
        iuv: 0.0,
        perimeter: ellipse_perimeter(a, b),
        line_centroid_uv: (0.0, 0.0),
        boundary_uv: boundary,
    }
}

fn ellipse_perimeter(a: f64, b: f64) -> f64 {
    let rule = GaussLegendre::new(32);
    rule.integrate(0.0, 2.0 * std::f64::consts::PI, |t| {
        ((a * t.sin()).powi(2) + (b * t.cos()).powi(2)).sqrt()
    })
}
