//! Bent rods: planar profiles with their second moments of area, the rod
//! validity conditions, and the closed-form centroid of a rod bent along a
//! geodesic ribbon.
//!
//! A rod is a profile D0 in the (u, v) plane swept along a ribbon with
//! kappa_g = 0 (condition a). With the profile centered at its centroid and
//! mirror-symmetric about the u- or v-axis (condition b), and the bending
//! shallow enough that u_max * max|kappa_n| < 1 (condition c), the volume is
//! exactly A*L and the centroid is
//!
//! ```text
//! c(K) = c(gamma) + Iv / (A L) * (T(0) - T(L)).
//! ```

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};
use crate::frames::Ribbon;
use crate::quad::{composite_nodes, GaussLegendre};
use crate::volume::SliceSection;

/// Planar profile shapes. Polygon vertices are listed counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    Disk { radius: f64 },
    Rectangle { width: f64, height: f64 },
    Ellipse { a: f64, b: f64 },
    Polygon { vertices: Vec<(f64, f64)> },
}

/// Mirror symmetries of a profile about its centroidal axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileSymmetry {
    /// Symmetric under v -> -v.
    UAxis,
    /// Symmetric under u -> -u.
    VAxis,
    Both,
    None,
}

impl ProfileSymmetry {
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, Self::None)
    }
}

/// A profile recentered at its area centroid, with area, centroidal second
/// moments (iu = integral v^2, iv = integral u^2, iuv = integral u*v),
/// detected mirror symmetry and u-extents.
#[derive(Debug, Clone)]
pub struct Profile {
    pub shape: ProfileShape,
    pub area: f64,
    pub iu: f64,
    pub iv: f64,
    pub iuv: f64,
    pub symmetry: ProfileSymmetry,
    /// max |u| over the profile.
    pub extent: f64,
    /// max u over the profile (the side toward the curvature center).
    pub extent_pos_u: f64,
    /// Recentered polygon vertices (polygon profiles only).
    vertices: Option<Vec<(f64, f64)>>,
}

/// Compute area, centroid and second moments of a profile shape, recentering
/// it so the centroid sits at the local origin. Closed forms for disk,
/// rectangle and ellipse; Green-theorem vertex sums for polygons. Clockwise
/// polygons are reversed with a warning, self-intersecting ones rejected.
pub fn profile_moments(shape: ProfileShape) -> Result<Profile> {
    match shape {
        ProfileShape::Disk { radius } => {
            if !(radius > 0.0) {
                return Err(Error::InvalidInput("disk radius must be positive".into()));
            }
            let area = std::f64::consts::PI * radius * radius;
            let i = area * radius * radius / 4.0;
            Ok(Profile {
                shape: ProfileShape::Disk { radius },
                area,
                iu: i,
                iv: i,
                iuv: 0.0,
                symmetry: ProfileSymmetry::Both,
                extent: radius,
                extent_pos_u: radius,
                vertices: None,
            })
        }
        ProfileShape::Rectangle { width, height } => {
            if !(width > 0.0 && height > 0.0) {
                return Err(Error::InvalidInput(
                    "rectangle sides must be positive".into(),
                ));
            }
            let area = width * height;
            Ok(Profile {
                shape: ProfileShape::Rectangle { width, height },
                area,
                iu: width * height.powi(3) / 12.0,
                iv: height * width.powi(3) / 12.0,
                iuv: 0.0,
                symmetry: ProfileSymmetry::Both,
                extent: width / 2.0,
                extent_pos_u: width / 2.0,
                vertices: None,
            })
        }
        ProfileShape::Ellipse { a, b } => {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::InvalidInput(
                    "ellipse semi-axes must be positive".into(),
                ));
            }
            let area = std::f64::consts::PI * a * b;
            Ok(Profile {
                shape: ProfileShape::Ellipse { a, b },
                area,
                iu: area * b * b / 4.0,
                iv: area * a * a / 4.0,
                iuv: 0.0,
                symmetry: ProfileSymmetry::Both,
                extent: a,
                extent_pos_u: a,
                vertices: None,
            })
        }
        ProfileShape::Polygon { vertices } => polygon_profile(vertices),
    }
}

fn polygon_profile(mut vertices: Vec<(f64, f64)>) -> Result<Profile> {
    if vertices.len() < 3 {
        return Err(Error::InvalidInput(
            "polygon needs at least 3 vertices".into(),
        ));
    }
    if polygon_self_intersects(&vertices) {
        return Err(Error::InvalidInput("polygon is self-intersecting".into()));
    }
    let signed = polygon_signed_area(&vertices);
    if signed.abs() < 1e-300 {
        return Err(Error::InvalidInput("polygon has zero area".into()));
    }
    if signed < 0.0 {
        log::warn!("polygon vertices are clockwise; reversing to counterclockwise");
        vertices.reverse();
    }

    let area = polygon_signed_area(&vertices);
    let (cu, cv) = polygon_centroid(&vertices, area);
    let recentered: Vec<(f64, f64)> = vertices
        .iter()
        .map(|&(u, v)| (u - cu, v - cv))
        .collect();
    let (ju, jv, juv) = polygon_second_moments(&recentered);

    let scale = area.abs().sqrt();
    let mirror_u = polygon_matches(&recentered, |(u, v)| (u, -v), 1e-10 * scale);
    let mirror_v = polygon_matches(&recentered, |(u, v)| (-u, v), 1e-10 * scale);
    let symmetry = match (mirror_u, mirror_v) {
        (true, true) => ProfileSymmetry::Both,
        (true, false) => ProfileSymmetry::UAxis,
        (false, true) => ProfileSymmetry::VAxis,
        (false, false) => ProfileSymmetry::None,
    };

    let extent = recentered
        .iter()
        .map(|&(u, _)| u.abs())
        .fold(0.0, f64::max);
    let extent_pos_u = recentered.iter().map(|&(u, _)| u).fold(f64::MIN, f64::max);

    Ok(Profile {
        shape: ProfileShape::Polygon {
            vertices: recentered.clone(),
        },
        area,
        iu: ju,
        iv: jv,
        iuv: juv,
        symmetry,
        extent,
        extent_pos_u,
        vertices: Some(recentered),
    })
}

fn polygon_signed_area(v: &[(f64, f64)]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (x0, y0) = v[i];
        let (x1, y1) = v[(i + 1) % n];
        acc += x0 * y1 - x1 * y0;
    }
    acc / 2.0
}

fn polygon_centroid(v: &[(f64, f64)], area: f64) -> (f64, f64) {
    let n = v.len();
    let mut cu = 0.0;
    let mut cv = 0.0;
    for i in 0..n {
        let (x0, y0) = v[i];
        let (x1, y1) = v[(i + 1) % n];
        let cross = x0 * y1 - x1 * y0;
        cu += (x0 + x1) * cross;
        cv += (y0 + y1) * cross;
    }
    (cu / (6.0 * area), cv / (6.0 * area))
}

/// Second moments about the origin: returns (integral v^2, integral u^2,
/// integral u*v).
fn polygon_second_moments(v: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = v.len();
    let mut ju = 0.0;
    let mut jv = 0.0;
    let mut juv = 0.0;
    for i in 0..n {
        let (x0, y0) = v[i];
        let (x1, y1) = v[(i + 1) % n];
        let cross = x0 * y1 - x1 * y0;
        ju += (y0 * y0 + y0 * y1 + y1 * y1) * cross;
        jv += (x0 * x0 + x0 * x1 + x1 * x1) * cross;
        juv += (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) * cross;
    }
    (ju / 12.0, jv / 12.0, juv / 24.0)
}

fn polygon_matches(
    v: &[(f64, f64)],
    map: impl Fn((f64, f64)) -> (f64, f64),
    tol: f64,
) -> bool {
    v.iter().all(|&p| {
        let q = map(p);
        v.iter()
            .any(|&w| (w.0 - q.0).abs() <= tol && (w.1 - q.1).abs() <= tol)
    })
}

fn polygon_self_intersects(v: &[(f64, f64)]) -> bool {
    let n = v.len();
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        for j in i + 1..n {
            // Skip adjacent edges (they share a vertex).
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let c = v[j];
            let d = v[(j + 1) % n];
            if segments_cross(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
        (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
    };
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

impl Profile {
    /// Polar boundary sampling around the centroid (profiles are star-shaped
    /// about it for the supported shapes), used to build slice sections.
    pub fn boundary_radius(&self, phi: f64) -> f64 {
        let (sin, cos) = phi.sin_cos();
        match &self.shape {
            ProfileShape::Disk { radius } => *radius,
            ProfileShape::Rectangle { width, height } => {
                let ru = if cos.abs() > 1e-300 {
                    width / 2.0 / cos.abs()
                } else {
                    f64::INFINITY
                };
                let rv = if sin.abs() > 1e-300 {
                    height / 2.0 / sin.abs()
                } else {
                    f64::INFINITY
                };
                ru.min(rv)
            }
            ProfileShape::Ellipse { a, b } => {
                a * b / ((b * cos).powi(2) + (a * sin).powi(2)).sqrt()
            }
            ProfileShape::Polygon { .. } => {
                let verts = self.vertices.as_ref().expect("polygon stores vertices");
                let n = verts.len();
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let (x0, y0) = verts[i];
                    let (x1, y1) = verts[(i + 1) % n];
                    // Ray (t cos, t sin) against segment (x0,y0)-(x1,y1).
                    let ex = x1 - x0;
                    let ey = y1 - y0;
                    let den = cos * ey - sin * ex;
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    let t = (x0 * ey - y0 * ex) / den;
                    let w = if ex.abs() > ey.abs() {
                        (t * cos - x0) / ex
                    } else {
                        (t * sin - y0) / ey
                    };
                    if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&w) {
                        best = best.min(t);
                    }
                }
                best
            }
        }
    }

    /// The profile as a rigid slice section centered on the curve.
    pub fn slice_section(&self, m: usize) -> SliceSection {
        let boundary = (0..m)
            .map(|j| {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let r = self.boundary_radius(phi);
                (r * phi.cos(), r * phi.sin())
            })
            .collect();
        SliceSection {
            area: self.area,
            centroid_uv: (0.0, 0.0),
            iu: self.iu,
            iv: self.iv,
            iuv: self.iuv,
            perimeter: 0.0,
            line_centroid_uv: (0.0, 0.0),
            boundary_uv: boundary,
        }
    }

    /// Membership test in profile coordinates.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        match &self.shape {
            ProfileShape::Disk { radius } => u * u + v * v <= radius * radius,
            ProfileShape::Rectangle { width, height } => {
                u.abs() <= width / 2.0 && v.abs() <= height / 2.0
            }
            ProfileShape::Ellipse { a, b } => (u / a).powi(2) + (v / b).powi(2) <= 1.0,
            ProfileShape::Polygon { .. } => {
                let verts = self.vertices.as_ref().expect("polygon stores vertices");
                let n = verts.len();
                let mut inside = false;
                let mut j = n - 1;
                for i in 0..n {
                    let (xi, yi) = verts[i];
                    let (xj, yj) = verts[j];
                    if (yi > v) != (yj > v) && u < (xj - xi) * (v - yi) / (yj - yi) + xi {
                        inside = !inside;
                    }
                    j = i;
                }
                inside
            }
        }
    }
}

/// A bent rod: a geodesic ribbon plus a profile, validated against the rod
/// conditions at construction.
#[derive(Debug, Clone)]
pub struct RodSpec {
    pub ribbon: Ribbon,
    pub profile: Profile,
    /// max |kappa_n| along the ribbon.
    pub mu: f64,
    /// Whether the one-sided bound u_max * mu < 1 was used (valid when
    /// kappa_n >= 0 everywhere).
    pub one_sided: bool,
}

impl RodSpec {
    /// Validate conditions (a) and (c): the ribbon is geodesic
    /// (kappa_g = 0 to 1e-8) and the profile clears the curvature centers.
    /// With `one_sided` and kappa_n >= 0 everywhere, only the positive-u
    /// extent is constrained.
    pub fn new(ribbon: Ribbon, profile: Profile, one_sided: bool) -> Result<Self> {
        let samples = 2048;
        let length = ribbon.length();
        let mut mu = 0.0f64;
        for i in 0..=samples {
            let s = length * i as f64 / samples as f64;
            let c = ribbon.curvatures(s);
            if c.kappa_g.abs() > 1e-8 {
                return Err(Error::RodCondition {
                    condition: 'a',
                    detail: format!(
                        "ribbon is not geodesic: |kappa_g| = {:.3e} at s = {:.6}",
                        c.kappa_g.abs(),
                        s
                    ),
                });
            }
            mu = mu.max(c.kappa_n.abs());
        }
        let one_sided_valid = one_sided && ribbon.kappa_n_nonnegative();
        let reach = if one_sided_valid {
            profile.extent_pos_u
        } else {
            profile.extent
        };
        if reach * mu >= 1.0 {
            return Err(Error::RodCondition {
                condition: 'c',
                detail: format!(
                    "profile reach {:.6} times peak curvature {:.6} is {:.6} >= 1; \
                     the rod would sweep through its bending centers",
                    reach,
                    mu,
                    reach * mu
                ),
            });
        }
        Ok(Self {
            ribbon,
            profile,
            mu,
            one_sided: one_sided_valid,
        })
    }
}

/// Volume and centroid of a bent rod: vol = A*L exactly, and
/// c(K) = c(gamma) + Iv/(A L) * (T(0) - T(L)). Requires a mirror-symmetric
/// profile (condition b).
pub fn bent_rod_centroid(rod: &RodSpec) -> Result<(f64, Point3<f64>)> {
    if !rod.profile.symmetry.is_symmetric() {
        return Err(Error::RodCondition {
            condition: 'b',
            detail: "profile is not mirror-symmetric about the u- or v-axis".into(),
        });
    }
    let length = rod.ribbon.length();
    let volume = rod.profile.area * length;

    let rule = GaussLegendre::new(4);
    let mut curve_centroid = Vector3::zeros();
    for (s, w) in composite_nodes(&rule, 0.0, length, 64) {
        curve_centroid += rod.ribbon.eval(s).point.coords * w;
    }
    curve_centroid /= length;

    let t0 = rod.ribbon.eval(0.0).frame.tangent;
    let t1 = rod.ribbon.eval(length).frame.tangent;
    let correction = (t0 - t1) * (rod.profile.iv / (rod.profile.area * length));
    Ok((volume, Point3::from(curve_centroid + correction)))
}

/// Moments of a revolution-segment generator: its area, the distance of its
/// centroid from the rotation axis, and the centroidal second moment about
/// the axis-parallel direction.
#[derive(Debug, Clone, Copy)]
pub struct RevolutionMoments {
    pub area: f64,
    pub r_bar: f64,
    pub i_zbar: f64,
}

/// Centroid of the segment of a body of revolution swept by `alpha` radians
/// from the positive x-axis around z:
///
/// ```text
/// c = I_z / (A r_bar alpha) * (sin alpha, 1 - cos alpha, 0),
/// I_z = A r_bar^2 + I_zbar  (parallel-axis shift to the rotation axis).
/// ```
pub fn revolution_segment_centroid(m: &RevolutionMoments, alpha: f64) -> Result<Point3<f64>> {
    if !(m.area > 0.0 && m.r_bar > 0.0) {
        return Err(Error::InvalidInput(
            "revolution segment needs positive area and centroid radius".into(),
        ));
    }
    if !(alpha > 0.0 && alpha <= 2.0 * std::f64::consts::PI + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "revolution angle must lie in (0, 2*pi], got {alpha}"
        )));
    }
    let i_z = m.area * m.r_bar * m.r_bar + m.i_zbar;
    let scale = i_z / (m.area * m.r_bar * alpha);
    Ok(Point3::new(
        scale * alpha.sin(),
        scale * (1.0 - alpha.cos()),
        0.0,
    ))
}
