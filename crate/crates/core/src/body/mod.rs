//! Smooth convex bodies given by implicit functions, with ray casting,
//! perpendicular plane sections and half-space segment volumes.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Point3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quad::Adaptive;

mod mc;
mod section;

pub use mc::{monte_carlo_volume, monte_carlo_volume_of_body, BoundingBox, McEstimate};
pub use section::{cross_section, section_area, SectionPlane, SectionProfile};

type ImplicitFn = Arc<dyn Fn(&Point3<f64>) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&Point3<f64>) -> Vector3<f64> + Send + Sync>;

/// Shape-specific data. Ball and ellipsoid carry exact ray intersection and
/// section centers; everything else goes through the generic implicit-function
/// machinery.
#[derive(Clone)]
enum BodyKind {
    Ball {
        center: Point3<f64>,
        radius: f64,
    },
    Ellipsoid {
        center: Point3<f64>,
        semi_axes: Vector3<f64>,
    },
    Superquadric {
        center: Point3<f64>,
        semi_axes: Vector3<f64>,
        exponents: Vector3<f64>,
    },
    Generic {
        implicit: ImplicitFn,
        gradient: GradientFn,
    },
}

impl fmt::Debug for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ball { center, radius } => f
                .debug_struct("Ball")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            Self::Ellipsoid { center, semi_axes } => f
                .debug_struct("Ellipsoid")
                .field("center", center)
                .field("semi_axes", semi_axes)
                .finish(),
            Self::Superquadric {
                center,
                semi_axes,
                exponents,
            } => f
                .debug_struct("Superquadric")
                .field("center", center)
                .field("semi_axes", semi_axes)
                .field("exponents", exponents)
                .finish(),
            Self::Generic { .. } => f.write_str("Generic { .. }"),
        }
    }
}

/// A compact convex body with smooth boundary, represented by an implicit
/// function F (negative inside, zero on the boundary) and its gradient.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    kind: BodyKind,
    interior_hint: Point3<f64>,
    bounding_radius: f64,
    min_curvature_radius: Option<f64>,
}

impl ConvexBody {
    pub fn ball(center: Point3<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("ball radius must be positive".into()));
        }
        Ok(Self {
            kind: BodyKind::Ball { center, radius },
            interior_hint: center,
            bounding_radius: radius,
            min_curvature_radius: Some(radius),
        })
    }

    pub fn unit_ball() -> Self {
        Self::ball(Point3::origin(), 1.0).expect("unit ball is valid")
    }

    /// Axis-aligned ellipsoid. The minimal principal radius of curvature is
    /// (min semi-axis)^2 / (max semi-axis), attained at the far ends of the
    /// longest axis.
    pub fn ellipsoid(center: Point3<f64>, semi_axes: [f64; 3]) -> Result<Self> {
        let [a, b, c] = semi_axes;
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::InvalidInput(
                "ellipsoid semi-axes must be positive".into(),
            ));
        }
        let min = a.min(b).min(c);
        let max = a.max(b).max(c);
        Ok(Self {
            kind: BodyKind::Ellipsoid {
                center,
                semi_axes: Vector3::new(a, b, c),
            },
            interior_hint: center,
            bounding_radius: max,
            min_curvature_radius: Some(min * min / max),
        })
    }

    /// Superquadric |x/a|^p + |y/b|^q + |z/c|^r <= 1. Exponents must be >= 2
    /// so the surface stays smooth and convex; a sampled midpoint check
    /// guards the construction like for generic bodies.
    pub fn superquadric(
        center: Point3<f64>,
        semi_axes: [f64; 3],
        exponents: [f64; 3],
    ) -> Result<Self> {
        let [a, b, c] = semi_axes;
        let [p, q, r] = exponents;
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::InvalidInput(
                "superquadric semi-axes must be positive".into(),
            ));
        }
        if !(p >= 2.0 && q >= 2.0 && r >= 2.0) {
            return Err(Error::InvalidInput(
                "superquadric exponents must be >= 2 for smooth convexity".into(),
            ));
        }
        let body = Self {
            kind: BodyKind::Superquadric {
                center,
                semi_axes: Vector3::new(a, b, c),
                exponents: Vector3::new(p, q, r),
            },
            interior_hint: center,
            bounding_radius: (a * a + b * b + c * c).sqrt(),
            min_curvature_radius: None,
        };
        body.validate_convexity()?;
        Ok(body)
    }

    /// Generic implicit body. The caller supplies F, its gradient, an
    /// interior point and a radius around that point that contains the body.
    /// Construction runs the convexity midpoint spot-check.
    pub fn generic(
        implicit: impl Fn(&Point3<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Point3<f64>) -> Vector3<f64> + Send + Sync + 'static,
        interior_hint: Point3<f64>,
        bounding_radius: f64,
    ) -> Result<Self> {
        if !(bounding_radius > 0.0) {
            return Err(Error::InvalidInput(
                "bounding radius must be positive".into(),
            ));
        }
        let body = Self {
            kind: BodyKind::Generic {
                implicit: Arc::new(implicit),
                gradient: Arc::new(gradient),
            },
            interior_hint,
            bounding_radius,
            min_curvature_radius: None,
        };
        if body.implicit(&interior_hint) >= 0.0 {
            return Err(Error::InvalidInput(
                "interior hint is not inside the body (F >= 0)".into(),
            ));
        }
        body.validate_convexity()?;
        Ok(body)
    }

    /// Midpoint spot-check with a fixed seed: 100 random boundary pairs, all
    /// midpoints must satisfy F <= 1e-9.
    fn validate_convexity(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x636f6e7665780a);
        for _ in 0..100 {
            let d1 = random_unit(&mut rng);
            let d2 = random_unit(&mut rng);
            let p1 = self.interior_hint + d1 * ray_boundary_distance(self, &self.interior_hint, &d1)?;
            let p2 = self.interior_hint + d2 * ray_boundary_distance(self, &self.interior_hint, &d2)?;
            let mid = nalgebra::center(&p1, &p2);
            if self.implicit(&mid) > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "convexity check failed: boundary midpoint has F = {:.3e} > 1e-9",
                    self.implicit(&mid)
                )));
            }
        }
        Ok(())
    }

    pub fn implicit(&self, p: &Point3<f64>) -> f64 {
        match &self.kind {
            BodyKind::Ball { center, radius } => (p - center).norm_squared() - radius * radius,
            BodyKind::Ellipsoid { center, semi_axes } => {
                let d = p - center;
                (d.x / semi_axes.x).powi(2) + (d.y / semi_axes.y).powi(2)
                    + (d.z / semi_axes.z).powi(2)
                    - 1.0
            }
            BodyKind::Superquadric {
                center,
                semi_axes,
                exponents,
            } => {
                let d = p - center;
                (d.x / semi_axes.x).abs().powf(exponents.x)
                    + (d.y / semi_axes.y).abs().powf(exponents.y)
                    + (d.z / semi_axes.z).abs().powf(exponents.z)
                    - 1.0
            }
            BodyKind::Generic { implicit, .. } => implicit(p),
        }
    }

    pub fn gradient(&self, p: &Point3<f64>) -> Vector3<f64> {
        match &self.kind {
            BodyKind::Ball { center, .. } => (p - center) * 2.0,
            BodyKind::Ellipsoid { center, semi_axes } => {
                let d = p - center;
                Vector3::new(
                    2.0 * d.x / (semi_axes.x * semi_axes.x),
                    2.0 * d.y / (semi_axes.y * semi_axes.y),
                    2.0 * d.z / (semi_axes.z * semi_axes.z),
                )
            }
            BodyKind::Superquadric {
                center,
                semi_axes,
                exponents,
            } => {
                let d = p - center;
                let comp = |x: f64, a: f64, e: f64| {
                    if x == 0.0 {
                        0.0
                    } else {
                        e / a * (x / a).abs().powf(e - 1.0) * x.signum()
                    }
                };
                Vector3::new(
                    comp(d.x, semi_axes.x, exponents.x),
                    comp(d.y, semi_axes.y, exponents.y),
                    comp(d.z, semi_axes.z, exponents.z),
                )
            }
            BodyKind::Generic { gradient, .. } => gradient(p),
        }
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        self.implicit(p) < 0.0
    }

    pub fn interior_hint(&self) -> Point3<f64> {
        self.interior_hint
    }

    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    /// Minimal principal radius of curvature when known analytically.
    pub fn min_curvature_radius(&self) -> Option<f64> {
        self.min_curvature_radius
    }

    /// Floating-body validity threshold 2*pi*rho^3/3 when rho is known.
    pub fn sigma(&self) -> Option<f64> {
        self.min_curvature_radius.map(|r| {
            2.0 * std::f64::consts::PI * r.powi(3) / 3.0
        })
    }

    /// Axis-aligned box guaranteed to contain the body.
    pub fn bounding_box(&self) -> BoundingBox {
        match &self.kind {
            BodyKind::Ball { center, radius } => BoundingBox::centered(*center, Vector3::repeat(*radius)),
            BodyKind::Ellipsoid { center, semi_axes }
            | BodyKind::Superquadric {
                center, semi_axes, ..
            } => BoundingBox::centered(*center, *semi_axes),
            BodyKind::Generic { .. } => {
                BoundingBox::centered(self.interior_hint, Vector3::repeat(self.bounding_radius))
            }
        }
    }

    /// Closed-form boundary distance along a ray for quadric shapes.
    fn exact_ray(&self, origin: &Point3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        let (o, d) = match &self.kind {
            BodyKind::Ball { center, .. } => (origin - center, *dir),
            BodyKind::Ellipsoid { center, semi_axes } => {
                let o = origin - center;
                (
                    Vector3::new(o.x / semi_axes.x, o.y / semi_axes.y, o.z / semi_axes.z),
                    Vector3::new(dir.x / semi_axes.x, dir.y / semi_axes.y, dir.z / semi_axes.z),
                )
            }
            _ => return None,
        };
        let radius = match &self.kind {
            BodyKind::Ball { radius, .. } => *radius,
            _ => 1.0,
        };
        // Stable positive root of |o + t d|^2 = radius^2 for an interior o.
        let a = d.norm_squared();
        let b = 2.0 * o.dot(&d);
        let c = o.norm_squared() - radius * radius;
        let disc = (b * b - 4.0 * a * c).max(0.0);
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let (t1, t2) = (q / a, if q == 0.0 { 0.0 } else { c / q });
        Some(t1.max(t2))
    }

    /// Range of <x - p, n> over the body; exact support values for ball and
    /// ellipsoid, a bounding-sphere estimate otherwise.
    pub fn support_interval(&self, n: &Vector3<f64>, p: &Point3<f64>) -> (f64, f64) {
        match &self.kind {
            BodyKind::Ball { center, radius } => {
                let c = (center - p).dot(n);
                (c - radius, c + radius)
            }
            BodyKind::Ellipsoid { center, semi_axes } => {
                let c = (center - p).dot(n);
                let h = Vector3::new(semi_axes.x * n.x, semi_axes.y * n.y, semi_axes.z * n.z)
                    .norm();
                (c - h, c + h)
            }
            _ => {
                let c = (self.interior_hint - p).dot(n);
                (c - self.bounding_radius, c + self.bounding_radius)
            }
        }
    }

    /// Exact center of the plane section for ball and ellipsoid; used only to
    /// seed the pole of the polar integration, never for the integrals.
    fn section_center(&self, normal: &Vector3<f64>, point: &Point3<f64>) -> Option<Point3<f64>> {
        match &self.kind {
            BodyKind::Ball { center, .. } => {
                Some(center + normal * (point - center).dot(normal))
            }
            BodyKind::Ellipsoid { center, semi_axes } => {
                let d = (point - center).dot(normal);
                let qi_n = Vector3::new(
                    semi_axes.x * semi_axes.x * normal.x,
                    semi_axes.y * semi_axes.y * normal.y,
                    semi_axes.z * semi_axes.z * normal.z,
                );
                Some(center + qi_n * (d / normal.dot(&qi_n)))
            }
            _ => None,
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Distance from an interior point to the boundary along a unit direction.
/// Quadric shapes solve the intersection in closed form; other bodies
/// bracket by bisection to 1e-13 * bounding_radius and polish with three
/// Newton steps on the gradient.
pub fn ray_boundary_distance(
    body: &ConvexBody,
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
) -> Result<f64> {
    if body.implicit(origin) >= 0.0 {
        return Err(Error::NotInterior(origin.x, origin.y, origin.z));
    }
    if (dir.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput("ray direction must be unit".into()));
    }
    if let Some(t) = body.exact_ray(origin, dir) {
        return Ok(t);
    }

    let mut lo = 0.0;
    let mut hi = 2.0 * body.bounding_radius();
    if body.implicit(&(origin + dir * hi)) <= 0.0 {
        return Err(Error::BracketingFailed);
    }
    let width_tol = 1e-13 * body.bounding_radius();
    while hi - lo > width_tol {
        let mid = 0.5 * (lo + hi);
        if body.implicit(&(origin + dir * mid)) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..3 {
        let p = origin + dir * t;
        let slope = body.gradient(&p).dot(dir);
        if slope.abs() < 1e-300 {
            break;
        }
        t = (t - body.implicit(&p) / slope).clamp(lo, hi);
    }
    Ok(t)
}

/// Quadrature settings for slice-based volume integrals.
#[derive(Debug, Clone)]
pub struct SliceQuad {
    pub rel_tol: f64,
    pub area_samples: usize,
}

impl Default for SliceQuad {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            area_samples: 256,
        }
    }
}

/// Volume cut off from the body by the plane through `p` perpendicular to
/// `n`, on the side <x - p, n> <= 0. Computed as an adaptive quadrature of
/// slice areas perpendicular to n.
pub fn halfspace_volume(
    body: &ConvexBody,
    n: &Vector3<f64>,
    p: &Point3<f64>,
    quad: &SliceQuad,
) -> Result<f64> {
    if (n.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput("halfspace normal must be unit".into()));
    }
    let (zl, zh) = body.support_interval(n, p);
    if zl >= 0.0 {
        return Ok(0.0);
    }
    let hi = zh.min(0.0);

    let mut inner_err: Option<Error> = None;
    let rule = Adaptive {
        rel_tol: quad.rel_tol,
        abs_scale: body.bounding_radius().powi(3) * quad.rel_tol.max(1e-12),
        max_depth: 48,
    };
    let value = rule.integrate(zl, hi, |z| {
        match section_area(body, n, &(p + n * z), quad.area_samples) {
            Ok(a) => a,
            Err(e) => {
                if inner_err.is_none() {
                    inner_err = Some(e);
                }
                0.0
            }
        }
    })?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(value.max(0.0))
}

/// Volume of the cap cut from the unit ball by the tangent plane of the
/// concentric sphere with radius r: pi/3 (1-r)^2 (2+r).
pub fn cap_volume_ball(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!(
            "cap radius must lie in (0, 1), got {r}"
        )));
    }
    Ok(std::f64::consts::PI / 3.0 * (1.0 - r).powi(2) * (2.0 + r))
}
