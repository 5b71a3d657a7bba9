//! Lateral-surface-area lower bound for solids swept along a framed curve.
//!
//! The boundary is parametrized as p(s,t) = gamma(s) + u(s,t) N(s) + v(s,t) B(s)
//! with t periodic. The lateral area is bounded below by
//!
//! ```text
//! area >= integral of L(s) * (1 - (u_bar_L * kn - v_bar_L * kg)) ds
//! ```
//!
//! where L(s) is the perimeter of the cross-section boundary and
//! (u_bar_L, v_bar_L) its arc-length-weighted centroid. The bound is tight
//! exactly when (u_s - tg*v) v_t - (v_s + tg*u) u_t vanishes identically,
//! e.g. rigid sections carried along a planar curve. Note the bound uses the
//! line centroid of the boundary curve, not the area centroid of the slice;
//! the two are stored separately throughout this crate to keep them from
//! being mixed up. End caps are not part of the parametrization, so the
//! bound concerns the lateral surface only.

use std::io::{BufRead, Write};

use nalgebra::Point3;

use crate::body::{cross_section, ConvexBody, SectionPlane};
use crate::error::{Error, Result};
use crate::frames::{parse_f64_row, Curvatures, Ribbon};
use crate::quad::{composite_nodes, GaussLegendre};
use crate::spectral::periodic_derivative;

/// Boundary samples u(s,t), v(s,t) on a quadrature grid in s and a uniform
/// periodic grid in t, together with the ribbon curvatures at the s nodes.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    s_grid: Vec<f64>,
    s_weights: Vec<f64>,
    curvatures: Vec<Curvatures>,
    t_period: f64,
    /// u[i][j] = u(s_i, t_j); rows share the uniform t grid.
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl BoundaryTrace {
    /// Sample a section-boundary function on composite Gauss-Legendre nodes
    /// in s and m uniform nodes per period in t.
    pub fn from_fn(
        ribbon: &Ribbon,
        s_panels: usize,
        gl_order: usize,
        m: usize,
        t_period: f64,
        f: impl Fn(f64, f64) -> (f64, f64),
    ) -> Result<Self> {
        if m < 8 {
            return Err(Error::InvalidInput(
                "boundary trace needs at least 8 samples per section".into(),
            ));
        }
        if !(t_period > 0.0) {
            return Err(Error::InvalidInput("t period must be positive".into()));
        }
        let rule = GaussLegendre::new(gl_order);
        let nodes = composite_nodes(&rule, 0.0, ribbon.length(), s_panels);
        let mut trace = Self {
            s_grid: Vec::with_capacity(nodes.len()),
            s_weights: Vec::with_capacity(nodes.len()),
            curvatures: Vec::with_capacity(nodes.len()),
            t_period,
            u: Vec::with_capacity(nodes.len()),
            v: Vec::with_capacity(nodes.len()),
        };
        for (s, w) in nodes {
            let mut urow = Vec::with_capacity(m);
            let mut vrow = Vec::with_capacity(m);
            for j in 0..m {
                let t = t_period * j as f64 / m as f64;
                let (uu, vv) = f(s, t);
                urow.push(uu);
                vrow.push(vv);
            }
            trace.s_grid.push(s);
            trace.s_weights.push(w);
            trace.curvatures.push(ribbon.curvatures(s));
            trace.u.push(urow);
            trace.v.push(vrow);
        }
        trace.validate()?;
        Ok(trace)
    }

    /// Boundary trace of a convex body's cross-sections along a ribbon,
    /// parametrized by the polar angle of each section.
    pub fn from_body(
        body: &ConvexBody,
        ribbon: &Ribbon,
        s_panels: usize,
        gl_order: usize,
        m: usize,
    ) -> Result<Self> {
        let rule = GaussLegendre::new(gl_order);
        let nodes = composite_nodes(&rule, 0.0, ribbon.length(), s_panels);
        let mut trace = Self {
            s_grid: Vec::with_capacity(nodes.len()),
            s_weights: Vec::with_capacity(nodes.len()),
            curvatures: Vec::with_capacity(nodes.len()),
            t_period: 2.0 * std::f64::consts::PI,
            u: Vec::with_capacity(nodes.len()),
            v: Vec::with_capacity(nodes.len()),
        };
        for (s, w) in nodes {
            let pt = ribbon.eval(s);
            let plane = SectionPlane::with_axes(
                pt.frame.tangent,
                pt.point,
                pt.frame.normal,
                pt.frame.binormal,
            )?;
            let profile = cross_section(body, &plane, m)?;
            if profile.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "ribbon leaves the body: empty cross-section at s = {s:.6}"
                )));
            }
            let uv = profile.boundary_uv();
            trace.s_grid.push(s);
            trace.s_weights.push(w);
            trace.curvatures.push(pt.curvatures);
            trace.u.push(uv.iter().map(|p| p.0).collect());
            trace.v.push(uv.iter().map(|p| p.1).collect());
        }
        trace.validate()?;
        Ok(trace)
    }

    /// Parse a CSV grid with columns `s,t,u,v` (rectangular in t per s). The
    /// ribbon supplies the curvatures; integration weights are composite
    /// trapezoid over the s rows.
    pub fn from_csv<R: BufRead>(input: R, ribbon: &Ribbon, t_period: f64) -> Result<Self> {
        let mut rows: Vec<[f64; 4]> = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('s') {
                continue;
            }
            let cols = parse_f64_row(line, 4, lineno + 1)?;
            rows.push(cols.try_into().expect("checked length"));
        }
        if rows.is_empty() {
            return Err(Error::Csv("boundary trace csv has no rows".into()));
        }
        let mut s_grid = Vec::new();
        let mut u: Vec<Vec<f64>> = Vec::new();
        let mut v: Vec<Vec<f64>> = Vec::new();
        for row in rows {
            if s_grid.last().map(|&s| s != row[0]).unwrap_or(true) {
                s_grid.push(row[0]);
                u.push(Vec::new());
                v.push(Vec::new());
            }
            u.last_mut().unwrap().push(row[2]);
            v.last_mut().unwrap().push(row[3]);
        }
        let m = u[0].len();
        if u.iter().any(|r| r.len() != m) {
            return Err(Error::Csv("boundary trace grid is not rectangular".into()));
        }
        if s_grid.len() < 2 {
            return Err(Error::Csv("boundary trace needs at least 2 s rows".into()));
        }
        // Composite trapezoid weights on the (possibly non-uniform) s grid,
        // with the end weights stretched to cover the full ribbon span.
        let n = s_grid.len();
        let mut s_weights = vec![0.0; n];
        for i in 0..n - 1 {
            let h = s_grid[i + 1] - s_grid[i];
            if h <= 0.0 {
                return Err(Error::Csv("s column must be strictly ascending".into()));
            }
            s_weights[i] += 0.5 * h;
            s_weights[i + 1] += 0.5 * h;
        }
        s_weights[0] += (s_grid[0] - 0.0).max(0.0);
        s_weights[n - 1] += (ribbon.length() - s_grid[n - 1]).max(0.0);
        let curvatures = s_grid.iter().map(|&s| ribbon.curvatures(s)).collect();
        let trace = Self {
            s_grid,
            s_weights,
            curvatures,
            t_period,
            u,
            v,
        };
        trace.validate()?;
        Ok(trace)
    }

    /// CSV export with columns `s,t,u,v`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "s,t,u,v")?;
        let m = self.u[0].len();
        for (i, &s) in self.s_grid.iter().enumerate() {
            for j in 0..m {
                let t = self.t_period * j as f64 / m as f64;
                writeln!(out, "{s},{t},{},{}", self.u[i][j], self.v[i][j])?;
            }
        }
        Ok(())
    }

    pub fn num_sections(&self) -> usize {
        self.s_grid.len()
    }

    pub fn s_grid(&self) -> &[f64] {
        &self.s_grid
    }

    /// Each section boundary must be a simple closed curve at sample
    /// resolution with nonzero perimeter.
    fn validate(&self) -> Result<()> {
        for i in 0..self.s_grid.len() {
            let m = self.u[i].len();
            let pts: Vec<(f64, f64)> = (0..m).map(|j| (self.u[i][j], self.v[i][j])).collect();
            let mut perim = 0.0;
            for j in 0..m {
                let a = pts[j];
                let b = pts[(j + 1) % m];
                perim += ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
            }
            if perim < 1e-12 {
                return Err(Error::DegenerateBoundary(perim));
            }
            if polyline_self_intersects(&pts) {
                return Err(Error::InvalidInput(format!(
                    "section boundary at s = {:.6} self-intersects",
                    self.s_grid[i]
                )));
            }
        }
        Ok(())
    }
}

fn polyline_self_intersects(pts: &[(f64, f64)]) -> bool {
    let n = pts.len();
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let c = pts[j];
            let d = pts[(j + 1) % n];
            let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
                (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
            };
            if orient(a, b, c) * orient(a, b, d) < 0.0 && orient(c, d, a) * orient(c, d, b) < 0.0
            {
                return true;
            }
        }
    }
    false
}

/// Perimeter and arc-length-weighted boundary centroid of one section:
/// spectral differentiation in t, periodic trapezoid quadrature.
pub fn boundary_line_stats(trace: &BoundaryTrace, s_index: usize) -> Result<(f64, f64, f64)> {
    let u = &trace.u[s_index];
    let v = &trace.v[s_index];
    let m = u.len();
    let ut = periodic_derivative(u, trace.t_period);
    let vt = periodic_derivative(v, trace.t_period);
    let dt = trace.t_period / m as f64;
    let mut length = 0.0;
    let mut cu = 0.0;
    let mut cv = 0.0;
    for j in 0..m {
        let ds = (ut[j] * ut[j] + vt[j] * vt[j]).sqrt();
        length += ds;
        cu += u[j] * ds;
        cv += v[j] * ds;
    }
    length *= dt;
    cu *= dt;
    cv *= dt;
    if length < 1e-12 {
        return Err(Error::DegenerateBoundary(length));
    }
    Ok((length, cu / length, cv / length))
}

/// Lower bound for the lateral surface area. Requires the Jacobian
/// positivity condition 1 - u*kn + v*kg > 0 at every boundary sample.
pub fn area_lower_bound(trace: &BoundaryTrace) -> Result<f64> {
    for i in 0..trace.num_sections() {
        let k = &trace.curvatures[i];
        for j in 0..trace.u[i].len() {
            let (u, v) = (trace.u[i][j], trace.v[i][j]);
            let margin = 1.0 - u * k.kappa_n + v * k.kappa_g;
            if margin <= 0.0 {
                return Err(Error::DiffeoViolated {
                    s: trace.s_grid[i],
                    u,
                    v,
                    margin,
                });
            }
        }
    }
    let mut total = 0.0;
    for i in 0..trace.num_sections() {
        let (length, ub, vb) = boundary_line_stats(trace, i)?;
        let k = &trace.curvatures[i];
        total += trace.s_weights[i] * length * (1.0 - (ub * k.kappa_n - vb * k.kappa_g));
    }
    Ok(total)
}

/// Deviation from the tightness condition of the area bound: the maximum of
/// |(u_s - tg*v) v_t - (v_s + tg*u) u_t| over the grid, normalized per
/// section by L(s) times the peak boundary speed. Near zero means the lower
/// bound equals the lateral area.
pub fn equality_defect(trace: &BoundaryTrace) -> f64 {
    let n = trace.num_sections();
    let m = trace.u[0].len();

    // s-derivatives by 3-point finite differences on the non-uniform grid.
    let us = grid_s_derivative(&trace.s_grid, &trace.u);
    let vs = grid_s_derivative(&trace.s_grid, &trace.v);

    let mut worst = 0.0f64;
    for i in 0..n {
        let ut = periodic_derivative(&trace.u[i], trace.t_period);
        let vt = periodic_derivative(&trace.v[i], trace.t_period);
        let tg = trace.curvatures[i].tau_g;
        let dt = trace.t_period / m as f64;
        let mut length = 0.0;
        let mut speed = 0.0f64;
        for j in 0..m {
            let sp = (ut[j] * ut[j] + vt[j] * vt[j]).sqrt();
            length += sp * dt;
            speed = speed.max(sp);
        }
        if length < 1e-300 || speed < 1e-300 {
            continue;
        }
        let mut peak = 0.0f64;
        for j in 0..m {
            let expr = (us[i][j] - tg * trace.v[i][j]) * vt[j]
                - (vs[i][j] + tg * trace.u[i][j]) * ut[j];
            peak = peak.max(expr.abs());
        }
        worst = worst.max(peak / (length * speed));
    }
    worst
}

fn grid_s_derivative(s: &[f64], rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = s.len();
    let m = rows[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        // Three-point stencil clamped at the ends.
        let k = i.clamp(1, n - 2);
        let (x0, x1, x2) = (s[k - 1], s[k], s[k + 1]);
        let xe = s[i];
        let w0 = (2.0 * xe - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let w1 = (2.0 * xe - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let w2 = (2.0 * xe - x0 - x1) / ((x2 - x0) * (x2 - x1));
        for j in 0..m {
            out[i][j] =
                w0 * rows[k - 1][j] + w1 * rows[k][j] + w2 * rows[k + 1][j];
        }
    }
    out
}

/// Triangulated area of the swept surface on an (ns+1) x nt grid: each
/// bilinear quad split into two triangles. Independent of the quadrature
/// used by the lower bound.
pub fn swept_mesh_area(
    ribbon: &Ribbon,
    t_period: f64,
    f: &impl Fn(f64, f64) -> (f64, f64),
    ns: usize,
    nt: usize,
) -> f64 {
    let length = ribbon.length();
    let point = |i: usize, j: usize| -> Point3<f64> {
        let s = length * i as f64 / ns as f64;
        let t = t_period * (j % nt) as f64 / nt as f64;
        let pt = ribbon.eval(s);
        let (u, v) = f(s, t);
        pt.point + pt.frame.normal * u + pt.frame.binormal * v
    };
    let mut area = 0.0;
    for i in 0..ns {
        let mut row0: Vec<Point3<f64>> = (0..=nt).map(|j| point(i, j)).collect();
        let row1: Vec<Point3<f64>> = (0..=nt).map(|j| point(i + 1, j)).collect();
        for j in 0..nt {
            let (a, b, c, d) = (row0[j], row1[j], row1[j + 1], row0[j + 1]);
            area += 0.5 * (b - a).cross(&(c - a)).norm();
            area += 0.5 * (c - a).cross(&(d - a)).norm();
        }
        row0.clear();
    }
    area
}

/// Mesh area refined until its own Richardson estimate drops below
/// `rel_tol`; returns the extrapolated area.
pub fn swept_mesh_area_refined(
    ribbon: &Ribbon,
    t_period: f64,
    f: &impl Fn(f64, f64) -> (f64, f64),
    rel_tol: f64,
) -> f64 {
    let (mut ns, mut nt) = (64, 64);
    let mut prev = swept_mesh_area(ribbon, t_period, f, ns, nt);
    for _ in 0..5 {
        ns *= 2;
        nt *= 2;
        let cur = swept_mesh_area(ribbon, t_period, f, ns, nt);
        let err = (cur - prev) / 3.0;
        if err.abs() <= rel_tol * cur.abs() {
            return cur + err;
        }
        prev = cur;
    }
    prev
}
