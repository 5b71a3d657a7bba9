//! Volume distance, barycentric cuts and centroid-curve tracing.
//!
//! For an interior point p of a convex body, the volume distance is the
//! smallest volume V(n, p) cut off by a plane through p, minimized over the
//! unit normal n. At the minimizer the section centroid coincides with p
//! (the cut is barycentric), and the minimizing normals form the tangent
//! field of the centroid curves: gamma' = n(gamma). Tracing that field with
//! a fourth-order step yields the centroid curve through a start point,
//! together with the cut volume delta(s) and section area A(s) along it.
//!
//! Minimization uses the closed-form sphere gradient A(n,p) * (p - c(n,p))
//! for the approach and a finite-difference Newton endgame; the stationarity
//! equation p = c(n, p) is driven to near machine precision so the traced
//! curve's accuracy is limited by the step size, not the inner solver.

use std::io::{BufRead, Write};

use nalgebra::{Point3, Vector3};

use crate::body::{halfspace_volume, ray_boundary_distance, ConvexBody, SectionPlane, SliceQuad};
use crate::error::{Error, Result};
use crate::frames::{parse_f64_row, perpendicular_unit};

/// A minimizing plane cut: inner normal, cut volume, section area and the
/// residual distance between the reference point and the section centroid.
#[derive(Debug, Clone)]
pub struct BarycentricCut {
    pub normal: Vector3<f64>,
    /// Volume cut off by the plane (the volume distance at convergence).
    pub delta: f64,
    pub area: f64,
    pub residual: f64,
    /// Other stationary normals found by the multi-start search (more than
    /// 5 degrees away), with their cut volumes.
    pub alternates: Vec<(Vector3<f64>, f64)>,
}

/// Options for the sphere minimization.
#[derive(Debug, Clone)]
pub struct CutOptions {
    pub section_samples: usize,
    /// Hard residual target as a fraction of the bounding radius.
    pub residual_scale: f64,
    /// Residual (fraction of bounding radius) below which a stalled
    /// iteration still counts as converged.
    pub stall_scale: f64,
    pub max_iter: usize,
    pub quad_rel_tol: f64,
}

impl Default for CutOptions {
    fn default() -> Self {
        Self {
            section_samples: 256,
            residual_scale: 1e-14,
            stall_scale: 1e-9,
            max_iter: 500,
            quad_rel_tol: 1e-9,
        }
    }
}

/// The 12 icosahedron vertices used as deterministic multi-start directions.
fn icosahedral_directions() -> [Vector3<f64>; 12] {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let n = (1.0 + phi * phi).sqrt();
    let a = 1.0 / n;
    let b = phi / n;
    [
        Vector3::new(0.0, a, b),
        Vector3::new(0.0, a, -b),
        Vector3::new(0.0, -a, b),
        Vector3::new(0.0, -a, -b),
        Vector3::new(a, b, 0.0),
        Vector3::new(a, -b, 0.0),
        Vector3::new(-a, b, 0.0),
        Vector3::new(-a, -b, 0.0),
        Vector3::new(b, 0.0, a),
        Vector3::new(-b, 0.0, a),
        Vector3::new(b, 0.0, -a),
        Vector3::new(-b, 0.0, -a),
    ]
}

/// Area and centroid of the section through `point` perpendicular to `n`,
/// with the polar pole at `point` itself (which must be interior).
fn section_stats(
    body: &ConvexBody,
    n: &Vector3<f64>,
    point: &Point3<f64>,
    m: usize,
) -> Result<(f64, Point3<f64>)> {
    let plane = SectionPlane::new(*n, *point)?;
    let mut area = 0.0;
    let mut cu = 0.0;
    let mut cv = 0.0;
    for j in 0..m {
        let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let (sin, cos) = phi.sin_cos();
        let dir = plane.x1 * cos + plane.x2 * sin;
        let r = ray_boundary_distance(body, point, &dir)?;
        let r2 = r * r;
        area += 0.5 * r2;
        cu += r2 * r / 3.0 * cos;
        cv += r2 * r / 3.0 * sin;
    }
    let dphi = 2.0 * std::f64::consts::PI / m as f64;
    area *= dphi;
    cu *= dphi;
    cv *= dphi;
    Ok((
        area,
        point + plane.x1 * (cu / area) + plane.x2 * (cv / area),
    ))
}

struct Refined {
    normal: Vector3<f64>,
    area: f64,
    residual: f64,
}

/// Drive the stationarity equation p = c(n, p) to convergence from one
/// start. Gradient steps 0.5 * (c - p) handle the approach; once the
/// residual is small the 2x2 tangent-space Newton update (finite-difference
/// Jacobian, damped) takes over and converges quadratically to the rounding
/// floor.
fn refine_normal(
    body: &ConvexBody,
    p: &Point3<f64>,
    n0: &Vector3<f64>,
    opts: &CutOptions,
) -> Result<Refined> {
    let rb = body.bounding_radius();
    let tol = opts.residual_scale * rb;
    let stall_tol = opts.stall_scale * rb;
    let m = opts.section_samples;
    let mut n = n0.normalize();

    let eval = |n: &Vector3<f64>| -> Result<(f64, Vector3<f64>)> {
        let (area, c) = section_stats(body, n, p, m)?;
        Ok((area, p - c))
    };

    let (mut area, mut res_vec) = eval(&n)?;
    let mut res = res_vec.norm();
    let gd_threshold = 1e-3 * rb;
    let mut stalled = 0usize;

    for _ in 0..opts.max_iter {
        if res < tol {
            break;
        }
        if res > gd_threshold {
            // Gradient step with the natural scale 0.5/A on A*(p - c).
            let cand = (n - res_vec * 0.5).normalize();
            let (a2, r2) = eval(&cand)?;
            if r2.norm() < res {
                n = cand;
                area = a2;
                res_vec = r2;
                res = r2.norm();
                continue;
            }
            // Fall through to the damped Newton update.
        }

        let e1 = perpendicular_unit(&n);
        let e2 = n.cross(&e1);
        let g = Vector3::new(res_vec.dot(&e1), res_vec.dot(&e2), 0.0);
        let eps = 1e-6;
        let mut jac = [[0.0f64; 2]; 2];
        for (k, ek) in [e1, e2].iter().enumerate() {
            let nk = (n + ek * eps).normalize();
            let (_, rk) = eval(&nk)?;
            jac[0][k] = (rk.dot(&e1) - g.x) / eps;
            jac[1][k] = (rk.dot(&e2) - g.y) / eps;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let (mut d1, mut d2) = if det.abs() > 1e-300 {
            (
                -(jac[1][1] * g.x - jac[0][1] * g.y) / det,
                -(-jac[1][0] * g.x + jac[0][0] * g.y) / det,
            )
        } else {
            // Singular Jacobian: fall back to a plain gradient step.
            (-0.5 * g.x, -0.5 * g.y)
        };
        let step_norm = (d1 * d1 + d2 * d2).sqrt();
        if step_norm > 0.5 {
            d1 *= 0.5 / step_norm;
            d2 *= 0.5 / step_norm;
        }

        let mut improved = false;
        for _ in 0..6 {
            let cand = (n + e1 * d1 + e2 * d2).normalize();
            let (a2, r2) = eval(&cand)?;
            if r2.norm() < res {
                n = cand;
                area = a2;
                res_vec = r2;
                res = r2.norm();
                improved = true;
                break;
            }
            d1 *= 0.5;
            d2 *= 0.5;
        }
        if !improved {
            stalled += 1;
            if stalled >= 2 {
                break;
            }
        } else {
            stalled = 0;
        }
    }

    if res < tol || (res < stall_tol) {
        Ok(Refined {
            normal: n,
            area,
            residual: res,
        })
    } else {
        Err(Error::MinimizerFailed {
            best_residual: res,
            nx: n.x,
            ny: n.y,
            nz: n.z,
        })
    }
}

/// Volume distance from an interior point: projected descent on the sphere
/// from the 12 icosahedral starts, cut volumes for each distinct stationary
/// normal, and the smallest one returned (first start wins ties, which makes
/// fully degenerate points such as a ball center deterministic).
pub fn volume_distance(
    body: &ConvexBody,
    p: &Point3<f64>,
    opts: &CutOptions,
) -> Result<BarycentricCut> {
    if body.implicit(p) >= 0.0 {
        return Err(Error::NotInterior(p.x, p.y, p.z));
    }
    let mut clusters: Vec<Refined> = Vec::new();
    let mut best_err: Option<Error> = None;
    for start in icosahedral_directions() {
        match refine_normal(body, p, &start, opts) {
            Ok(r) => {
                let distinct = clusters
                    .iter()
                    .all(|c| c.normal.dot(&r.normal).clamp(-1.0, 1.0).acos() > 5f64.to_radians());
                if distinct {
                    clusters.push(r);
                }
            }
            Err(e) => {
                if best_err.is_none() {
                    best_err = Some(e);
                }
            }
        }
    }
    if clusters.is_empty() {
        return Err(best_err.expect("no clusters implies at least one failure"));
    }
    let quad = SliceQuad {
        rel_tol: opts.quad_rel_tol,
        area_samples: opts.section_samples,
    };
    let volumes: Vec<f64> = clusters
        .iter()
        .map(|c| halfspace_volume(body, &c.normal, p, &quad))
        .collect::<Result<_>>()?;

    let tie_tol = 1e-7 * body.bounding_radius().powi(3);
    let mut best = 0;
    for i in 1..clusters.len() {
        if volumes[i] < volumes[best] - tie_tol {
            best = i;
        }
    }
    let alternates = clusters
        .iter()
        .zip(&volumes)
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, (c, &v))| (c.normal, v))
        .collect();
    Ok(BarycentricCut {
        normal: clusters[best].normal,
        delta: volumes[best],
        area: clusters[best].area,
        residual: clusters[best].residual,
        alternates,
    })
}

/// One sample of a centroid-curve trace. `normal` is the minimizing cut
/// normal, i.e. the tangent of the curve in the direction of increasing
/// delta.
#[derive(Debug, Clone, Copy)]
pub struct TraceSample {
    pub s: f64,
    pub gamma: Point3<f64>,
    pub normal: Vector3<f64>,
    pub delta: f64,
    pub area: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// delta reached the small-volume stop (the curve met the boundary).
    ReachedBoundary,
    /// delta reached the forward stop (sigma or the caller's delta_max).
    ReachedSigma,
    /// Section area fell below the floor.
    AreaFloor,
    /// The warm-started minimization jumped basins or failed.
    StepFailure,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::ReachedBoundary => "reached_boundary",
            Self::ReachedSigma => "reached_sigma",
            Self::AreaFloor => "area_floor",
            Self::StepFailure => "step_failure",
        };
        f.write_str(s)
    }
}

/// A traced centroid curve: samples ordered by increasing arc length, with
/// s = 0 at the start point, negative s on the backward (boundary) side.
#[derive(Debug, Clone)]
pub struct CentroidCurveTrace {
    pub samples: Vec<TraceSample>,
    pub stop_backward: StopReason,
    pub stop_forward: StopReason,
    pub diagnostics: Option<String>,
    /// Arc lengths where the periodic multi-start check found a strictly
    /// lower cut volume on another branch (non-unique barycentric cuts).
    pub nonunique_s: Vec<f64>,
}

impl CentroidCurveTrace {
    /// CSV export: `s,x,y,z,nx,ny,nz,delta,A`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "s,x,y,z,nx,ny,nz,delta,A")?;
        for t in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                t.s,
                t.gamma.x,
                t.gamma.y,
                t.gamma.z,
                t.normal.x,
                t.normal.y,
                t.normal.z,
                t.delta,
                t.area
            )?;
        }
        Ok(())
    }

    pub fn read_csv_rows<R: BufRead>(input: R) -> Result<Vec<[f64; 9]>> {
        let mut rows = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('s') {
                continue;
            }
            let cols = parse_f64_row(line, 9, lineno + 1)?;
            rows.push(cols.try_into().expect("checked length"));
        }
        Ok(rows)
    }
}

/// Stop criteria and step control for the tracer.
#[derive(Debug, Clone)]
pub struct TraceOptions {
    pub step: f64,
    /// Backward stop: the trace ends when delta falls to this value.
    pub delta_min: f64,
    /// Forward stop; defaults to the body's sigma when known.
    pub delta_max: Option<f64>,
    pub area_floor: f64,
    pub two_sided: bool,
    pub cut: CutOptions,
    /// Run the full multi-start check every this many accepted steps.
    pub basin_check_interval: usize,
    pub max_steps: usize,
}

impl TraceOptions {
    pub fn for_body(body: &ConvexBody) -> Self {
        let rb = body.bounding_radius();
        Self {
            step: rb / 500.0,
            delta_min: 1e-6 * rb.powi(3),
            delta_max: body.sigma(),
            area_floor: 1e-6 * rb * rb,
            two_sided: true,
            cut: CutOptions::default(),
            basin_check_interval: 25,
            max_steps: 100_000,
        }
    }
}

fn project_to_boundary(body: &ConvexBody, p: &Point3<f64>) -> Point3<f64> {
    let mut q = *p;
    for _ in 0..8 {
        let f = body.implicit(&q);
        let g = body.gradient(&q);
        let g2 = g.norm_squared();
        if g2 < 1e-300 {
            break;
        }
        q -= g * (f / g2);
    }
    q
}

/// Signed distance estimate to the boundary (positive inside).
fn boundary_distance_estimate(body: &ConvexBody, p: &Point3<f64>) -> f64 {
    let g = body.gradient(p).norm().max(1e-300);
    -body.implicit(p) / g
}

struct StageField<'a> {
    body: &'a ConvexBody,
    opts: &'a CutOptions,
}

impl StageField<'_> {
    fn normal(&self, p: &Point3<f64>, warm: &Vector3<f64>) -> Result<Refined> {
        if self.body.implicit(p) >= 0.0 {
            return Err(Error::NotInterior(p.x, p.y, p.z));
        }
        refine_normal(self.body, p, warm, self.opts)
    }
}

#[allow(clippy::too_many_arguments)]
fn trace_direction(
    body: &ConvexBody,
    start_point: Point3<f64>,
    start_normal: Vector3<f64>,
    start_delta: f64,
    dir: f64,
    opts: &TraceOptions,
    samples: &mut Vec<TraceSample>,
    nonunique: &mut Vec<f64>,
) -> Result<(StopReason, Option<String>)> {
    let field = StageField {
        body,
        opts: &opts.cut,
    };
    let quad = SliceQuad {
        rel_tol: opts.cut.quad_rel_tol,
        area_samples: opts.cut.section_samples,
    };
    let h = opts.step;
    let max_turn = 30f64.to_radians();

    let mut p = start_point;
    let mut n = start_normal;
    let mut delta = start_delta;
    let mut s = 0.0;
    let mut first = true;

    for step_index in 0..opts.max_steps {
        // Shrink the step near a delta stop so the trace lands on the
        // threshold; the slope estimate uses the latest section area and is
        // re-derived every pass, which closes in on the target geometrically.
        let mut h_eff = h;
        let area_guess = samples.last().map(|t| t.area).unwrap_or(0.0);
        if area_guess > 0.0 {
            if dir > 0.0 {
                if let Some(dmax) = opts.delta_max {
                    let remain = dmax - delta;
                    if remain <= area_guess * h {
                        h_eff = (remain / area_guess).clamp(1e-6 * h, h);
                    }
                }
            } else {
                let remain = delta - opts.delta_min;
                if remain <= area_guess * h {
                    h_eff = (remain / area_guess).clamp(1e-6 * h, h);
                }
            }
        }

        // Fourth-order step on gamma' = dir * n(gamma). On the very first
        // step from a boundary start the supplied surface normal serves as
        // the k1 stage value, which the limit of the cut normals justifies.
        let k1 = if first && start_delta == 0.0 {
            n
        } else {
            let r = field.normal(&p, &n)?;
            r.normal
        };
        let stage = |q: Point3<f64>, warm: &Vector3<f64>| -> Result<Vector3<f64>> {
            Ok(field.normal(&q, warm)?.normal)
        };
        let k2 = stage(p + k1 * (dir * 0.5 * h_eff), &k1)?;
        let k3 = stage(p + k2 * (dir * 0.5 * h_eff), &k2)?;
        let k4 = stage(p + k3 * (dir * h_eff), &k3)?;
        let p_next = p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dir * h_eff / 6.0);

        let refined = field.normal(&p_next, &k4)?;
        let turn = n.dot(&refined.normal).clamp(-1.0, 1.0).acos();
        if !first && turn > max_turn {
            return Ok((
                StopReason::StepFailure,
                Some(format!(
                    "cut normal turned {:.1} degrees in one step at s = {:.6}",
                    turn.to_degrees(),
                    s + dir * h_eff
                )),
            ));
        }

        let delta_next = halfspace_volume(body, &refined.normal, &p_next, &quad)?;
        if dir > 0.0 && delta_next <= delta {
            return Err(Error::StepFailure {
                s: s + h_eff,
                detail: format!(
                    "cut volume failed to increase: {delta_next:.12e} after {delta:.12e}"
                ),
            });
        }
        if dir < 0.0 && delta_next >= delta {
            return Err(Error::StepFailure {
                s: s - h_eff,
                detail: format!(
                    "cut volume failed to decrease: {delta_next:.12e} after {delta:.12e}"
                ),
            });
        }

        s += dir * h_eff;
        p = p_next;
        n = refined.normal;
        delta = delta_next;
        first = false;
        samples.push(TraceSample {
            s,
            gamma: p,
            normal: n,
            delta,
            area: refined.area,
            residual: refined.residual,
        });

        if dir < 0.0 && delta <= opts.delta_min * (1.0 + 1e-3) {
            return Ok((StopReason::ReachedBoundary, None));
        }
        if dir > 0.0 {
            if let Some(dmax) = opts.delta_max {
                if delta >= dmax * (1.0 - 1e-3) {
                    return Ok((StopReason::ReachedSigma, None));
                }
            }
        }
        if refined.area < opts.area_floor {
            return Ok((StopReason::AreaFloor, None));
        }

        if opts.basin_check_interval > 0 && (step_index + 1) % opts.basin_check_interval == 0 {
            if let Ok(full) = volume_distance(body, &p, &opts.cut) {
                let angle = full.normal.dot(&n).clamp(-1.0, 1.0).acos();
                if angle > 5f64.to_radians()
                    && full.delta < delta - 1e-7 * body.bounding_radius().powi(3)
                {
                    nonunique.push(s);
                }
            }
        }
    }
    Ok((
        StopReason::StepFailure,
        Some(format!("step budget exhausted after {} steps", opts.max_steps)),
    ))
}

/// Trace the centroid curve through `p0`. Forward integration follows the
/// minimizing normal (increasing delta); with `two_sided` the backward side
/// toward the boundary is traced as well and reported with negative s.
///
/// A start point on (or within rounding distance of) the boundary is
/// projected onto it and started along the inner surface normal, which is
/// the continuous limit of the cut normals there.
pub fn trace_centroid_curve(
    body: &ConvexBody,
    p0: &Point3<f64>,
    opts: &TraceOptions,
) -> Result<CentroidCurveTrace> {
    let rb = body.bounding_radius();
    let boundary_tol = 1e-7 * rb;
    let dist = boundary_distance_estimate(body, p0);
    if dist < -boundary_tol {
        return Err(Error::NotInterior(p0.x, p0.y, p0.z));
    }

    let mut samples = Vec::new();
    let mut nonunique = Vec::new();

    let (start_sample, ambiguous_checked) = if dist < boundary_tol {
        let q0 = project_to_boundary(body, p0);
        let n0 = -body.gradient(&q0).normalize();
        (
            TraceSample {
                s: 0.0,
                gamma: q0,
                normal: n0,
                delta: 0.0,
                area: 0.0,
                residual: 0.0,
            },
            true,
        )
    } else {
        let cut = volume_distance(body, p0, &opts.cut)?;
        let spread = cut
            .alternates
            .iter()
            .map(|&(_, v)| v - cut.delta)
            .fold(f64::INFINITY, f64::min);
        if spread < 1e-6 * cut.delta.max(1e-12) {
            return Err(Error::AmbiguousStart {
                count: cut.alternates.len() + 1,
                spread,
            });
        }
        if let Some(dmax) = opts.delta_max {
            if cut.delta >= dmax {
                return Err(Error::InvalidInput(format!(
                    "start cut volume {:.6e} already beyond the forward stop {:.6e}",
                    cut.delta, dmax
                )));
            }
        }
        (
            TraceSample {
                s: 0.0,
                gamma: *p0,
                normal: cut.normal,
                delta: cut.delta,
                area: cut.area,
                residual: cut.residual,
            },
            false,
        )
    };
    let _ = ambiguous_checked;

    // Backward side (toward the boundary).
    let mut backward = Vec::new();
    let stop_backward = if start_sample.delta <= opts.delta_min {
        StopReason::ReachedBoundary
    } else if opts.two_sided {
        let (reason, diag) = trace_direction(
            body,
            start_sample.gamma,
            start_sample.normal,
            start_sample.delta,
            -1.0,
            opts,
            &mut backward,
            &mut nonunique,
        )?;
        if let Some(d) = diag {
            backward.reverse();
            samples.extend(backward);
            samples.push(start_sample);
            return Ok(CentroidCurveTrace {
                samples,
                stop_backward: reason,
                stop_forward: StopReason::StepFailure,
                diagnostics: Some(d),
                nonunique_s: nonunique,
            });
        }
        reason
    } else {
        StopReason::ReachedBoundary
    };

    backward.reverse();
    samples.extend(backward);
    samples.push(start_sample);

    let mut forward = Vec::new();
    let (stop_forward, diagnostics) = trace_direction(
        body,
        start_sample.gamma,
        start_sample.normal,
        start_sample.delta,
        1.0,
        opts,
        &mut forward,
        &mut nonunique,
    )?;
    samples.extend(forward);

    Ok(CentroidCurveTrace {
        samples,
        stop_backward,
        stop_forward,
        diagnostics,
        nonunique_s: nonunique,
    })
}

/// Closed-form centroid curve of the axis-aligned ellipsoid with semi-axes
/// (a, b, c): through (x0, y0, z0) with x0 > 0,
/// y(x) = y0 (x/x0)^(a^2/b^2) and z(x) = z0 (x/x0)^(a^2/c^2), valid for
/// x > 0.
pub fn ellipsoid_centroid_curve(
    a: f64,
    b: f64,
    c: f64,
    p0: &Point3<f64>,
    x: f64,
) -> Result<(f64, f64)> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(Error::InvalidInput(
            "ellipsoid semi-axes must be positive".into(),
        ));
    }
    if !(p0.x > 0.0) {
        return Err(Error::InvalidInput(
            "start point must have positive x".into(),
        ));
    }
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!(
            "abscissa must be positive, got {x}; the power-law form is valid on x > 0"
        )));
    }
    let t = x / p0.x;
    Ok((
        p0.y * t.powf(a * a / (b * b)),
        p0.z * t.powf(a * a / (c * c)),
    ))
}

/// Angle between the terminal tangent of a trace that reached the boundary
/// and the inner surface normal at the nearest boundary point.
pub fn boundary_approach_angle(trace: &CentroidCurveTrace, body: &ConvexBody) -> Result<f64> {
    if trace.stop_backward != StopReason::ReachedBoundary {
        return Err(Error::WrongStopReason {
            actual: trace.stop_backward.to_string(),
        });
    }
    let terminal = trace
        .samples
        .first()
        .ok_or_else(|| Error::InvalidInput("trace has no samples".into()))?;
    let dist = boundary_distance_estimate(body, &terminal.gamma).abs();
    if dist > 1e-3 * body.bounding_radius() {
        return Err(Error::InvalidInput(format!(
            "terminal point is {:.3e} from the boundary, beyond 1e-3 * bounding radius",
            dist
        )));
    }
    let q = project_to_boundary(body, &terminal.gamma);
    let inner = -body.gradient(&q).normalize();
    Ok(terminal.normal.dot(&inner).clamp(-1.0, 1.0).acos())
}
