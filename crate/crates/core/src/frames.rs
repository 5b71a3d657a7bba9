//! Arc-length curves, ribbons and their orthogonal moving frames.
//!
//! A ribbon is a unit-speed curve together with a unit normal field along it.
//! With the binormal B = T x N, the frame F = (T, N, B) satisfies the linear
//! system F' = F * M with the skew matrix
//!
//! ```text
//!     |    0   -kn   kg |
//! M = |   kn     0  -tg |
//!     |  -kg    tg    0 |
//! ```
//!
//! so that T' = kn*N - kg*B, N' = -kn*T + tg*B, B' = kg*T - tg*N.
//! Note the sign convention B' = kg*T - tg*N is part of the contract here;
//! for kg = 0 it coincides with the Frenet torsion convention B' = -tau*N.

use std::io::{BufRead, Write};

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

/// Orthonormal moving frame (T, N, B) with B = T x N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub tangent: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub binormal: Vector3<f64>,
}

impl Frame {
    /// Build a frame from a tangent and normal; the binormal is their cross
    /// product. Errors if the inputs are not unit and orthogonal to 1e-10.
    pub fn new(tangent: Vector3<f64>, normal: Vector3<f64>) -> Result<Self> {
        let f = Self {
            tangent,
            normal,
            binormal: tangent.cross(&normal),
        };
        if f.orthonormality_defect() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "frame vectors not orthonormal (defect {:.3e})",
                f.orthonormality_defect()
            )));
        }
        Ok(f)
    }

    /// Frame with the world axes: T = x, N = y, B = z.
    pub fn identity() -> Self {
        Self {
            tangent: Vector3::x(),
            normal: Vector3::y(),
            binormal: Vector3::z(),
        }
    }

    /// A frame for a tangent with an arbitrary (deterministic) normal.
    pub fn from_tangent(tangent: Vector3<f64>) -> Self {
        let t = tangent.normalize();
        let normal = perpendicular_unit(&t);
        Self {
            tangent: t,
            normal,
            binormal: t.cross(&normal),
        }
    }

    /// Worst deviation from unit length, pairwise orthogonality and
    /// B = T x N.
    pub fn orthonormality_defect(&self) -> f64 {
        let t = &self.tangent;
        let n = &self.normal;
        let b = &self.binormal;
        let mut d: f64 = 0.0;
        d = d.max((t.norm() - 1.0).abs());
        d = d.max((n.norm() - 1.0).abs());
        d = d.max((b.norm() - 1.0).abs());
        d = d.max(t.dot(n).abs());
        d = d.max(t.dot(b).abs());
        d = d.max(n.dot(b).abs());
        d.max((b - t.cross(n)).norm())
    }

    /// Gram-Schmidt pass keeping the tangent direction.
    pub fn orthonormalized(&self) -> Self {
        let t = self.tangent.normalize();
        let n = (self.normal - t * t.dot(&self.normal)).normalize();
        Self {
            tangent: t,
            normal: n,
            binormal: t.cross(&n),
        }
    }

    pub fn rotated(&self, rot: &nalgebra::Rotation3<f64>) -> Self {
        Self {
            tangent: rot * self.tangent,
            normal: rot * self.normal,
            binormal: rot * self.binormal,
        }
    }
}

/// A deterministic unit vector perpendicular to v.
pub fn perpendicular_unit(v: &Vector3<f64>) -> Vector3<f64> {
    let a = v.x.abs();
    let b = v.y.abs();
    let c = v.z.abs();
    let axis = if a <= b && a <= c {
        Vector3::x()
    } else if b <= c {
        Vector3::y()
    } else {
        Vector3::z()
    };
    v.cross(&axis).normalize()
}

/// Curvature functions of a ribbon: normal curvature, geodesic curvature and
/// geodesic torsion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Curvatures {
    pub kappa_n: f64,
    pub kappa_g: f64,
    pub tau_g: f64,
}

impl Curvatures {
    pub fn new(kappa_n: f64, kappa_g: f64, tau_g: f64) -> Self {
        Self {
            kappa_n,
            kappa_g,
            tau_g,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.kappa_n.is_finite() && self.kappa_g.is_finite() && self.tau_g.is_finite()
    }
}

/// Right-hand side of the frame system: (T', N', B') for the given frame and
/// curvatures.
pub fn frame_derivative(
    frame: &Frame,
    curv: &Curvatures,
) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let dt = frame.normal * curv.kappa_n - frame.binormal * curv.kappa_g;
    let dn = -frame.tangent * curv.kappa_n + frame.binormal * curv.tau_g;
    let db = frame.tangent * curv.kappa_g - frame.normal * curv.tau_g;
    (dt, dn, db)
}

/// Curve point with its frame and curvatures.
#[derive(Debug, Clone, Copy)]
pub struct RibbonPoint {
    pub point: Point3<f64>,
    pub frame: Frame,
    pub curvatures: Curvatures,
}

/// A ribbon: closed-form for the shapes the volume formulas are exercised on,
/// or a dense sample table with interpolation.
#[derive(Debug, Clone)]
pub enum Ribbon {
    Line(Line),
    Arc(CircularArc),
    Helix(Helix),
    Sampled(SampledRibbon),
}

impl Ribbon {
    pub fn line(origin: Point3<f64>, frame: Frame, length: f64) -> Result<Self> {
        if length <= 0.0 {
            return Err(Error::InvalidInput("line length must be positive".into()));
        }
        Ok(Self::Line(Line {
            origin,
            frame: frame.orthonormalized(),
            length,
        }))
    }

    /// Circular arc of the given radius swept by `angle` radians, starting at
    /// center + radius * e1 and turning toward e2. The normal points at the
    /// center, so kappa_n = 1/radius and kappa_g = tau_g = 0.
    pub fn circular_arc(
        center: Point3<f64>,
        e1: Vector3<f64>,
        e2: Vector3<f64>,
        radius: f64,
        angle: f64,
    ) -> Result<Self> {
        if radius <= 0.0 || angle <= 0.0 {
            return Err(Error::InvalidInput(
                "arc radius and angle must be positive".into(),
            ));
        }
        let defect = (e1.norm() - 1.0)
            .abs()
            .max((e2.norm() - 1.0).abs())
            .max(e1.dot(&e2).abs());
        if defect > 1e-10 {
            return Err(Error::InvalidInput(
                "arc plane axes must be orthonormal".into(),
            ));
        }
        Ok(Self::Arc(CircularArc {
            center,
            e1,
            e2,
            radius,
            angle,
        }))
    }

    /// Full circle in the plane spanned by (e1, e2).
    pub fn circle(
        center: Point3<f64>,
        e1: Vector3<f64>,
        e2: Vector3<f64>,
        radius: f64,
    ) -> Result<Self> {
        Self::circular_arc(center, e1, e2, radius, 2.0 * std::f64::consts::PI)
    }

    /// Helix in standard position with constant curvature kappa > 0 and
    /// torsion tau, starting at (r, 0, 0) with the axis along z.
    pub fn helix(kappa: f64, tau: f64, length: f64) -> Result<Self> {
        if kappa <= 0.0 || length <= 0.0 {
            return Err(Error::InvalidInput(
                "helix curvature and length must be positive".into(),
            ));
        }
        Ok(Self::Helix(Helix { kappa, tau, length }))
    }

    pub fn length(&self) -> f64 {
        match self {
            Self::Line(l) => l.length,
            Self::Arc(a) => a.radius * a.angle,
            Self::Helix(h) => h.length,
            Self::Sampled(s) => s.length(),
        }
    }

    pub fn eval(&self, s: f64) -> RibbonPoint {
        match self {
            Self::Line(l) => l.eval(s),
            Self::Arc(a) => a.eval(s),
            Self::Helix(h) => h.eval(s),
            Self::Sampled(r) => r.eval(s),
        }
    }

    pub fn curvatures(&self, s: f64) -> Curvatures {
        match self {
            Self::Line(_) => Curvatures::default(),
            Self::Arc(a) => Curvatures::new(1.0 / a.radius, 0.0, 0.0),
            Self::Helix(h) => Curvatures::new(h.kappa, 0.0, h.tau),
            Self::Sampled(r) => r.eval(s).curvatures,
        }
    }

    /// Largest |kappa_n| along the ribbon (exact for closed forms, sampled
    /// on a dense grid otherwise).
    pub fn max_abs_kappa_n(&self) -> f64 {
        match self {
            Self::Line(_) => 0.0,
            Self::Arc(a) => 1.0 / a.radius,
            Self::Helix(h) => h.kappa,
            Self::Sampled(r) => r
                .curv
                .iter()
                .map(|c| c.kappa_n.abs())
                .fold(0.0, f64::max),
        }
    }

    /// True when kappa_n >= 0 at every sample point.
    pub fn kappa_n_nonnegative(&self) -> bool {
        match self {
            Self::Line(_) => true,
            Self::Arc(_) => true,
            Self::Helix(_) => true,
            Self::Sampled(r) => r.curv.iter().all(|c| c.kappa_n >= 0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Line {
    origin: Point3<f64>,
    frame: Frame,
    length: f64,
}

impl Line {
    fn eval(&self, s: f64) -> RibbonPoint {
        RibbonPoint {
            point: self.origin + self.frame.tangent * s,
            frame: self.frame,
            curvatures: Curvatures::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CircularArc {
    center: Point3<f64>,
    e1: Vector3<f64>,
    e2: Vector3<f64>,
    radius: f64,
    angle: f64,
}

impl CircularArc {
    fn eval(&self, s: f64) -> RibbonPoint {
        let th = s / self.radius;
        let (sin, cos) = th.sin_cos();
        let radial = self.e1 * cos + self.e2 * sin;
        let tangent = self.e2 * cos - self.e1 * sin;
        RibbonPoint {
            point: self.center + radial * self.radius,
            frame: Frame {
                tangent,
                normal: -radial,
                binormal: self.e1.cross(&self.e2),
            },
            curvatures: Curvatures::new(1.0 / self.radius, 0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Helix {
    kappa: f64,
    tau: f64,
    length: f64,
}

impl Helix {
    /// Cylinder radius of the helix realizing (kappa, tau).
    pub fn radius(&self) -> f64 {
        self.kappa / (self.kappa * self.kappa + self.tau * self.tau)
    }

    /// Height gained per turn.
    pub fn pitch(&self) -> f64 {
        let w2 = self.kappa * self.kappa + self.tau * self.tau;
        2.0 * std::f64::consts::PI * self.tau / w2
    }

    fn eval(&self, s: f64) -> RibbonPoint {
        let w2 = self.kappa * self.kappa + self.tau * self.tau;
        let w = w2.sqrt();
        let a = self.kappa / w2;
        let b = self.tau / w2;
        let (sin, cos) = (w * s).sin_cos();
        let point = Point3::new(a * cos, a * sin, b * w * s);
        let tangent = Vector3::new(-a * w * sin, a * w * cos, b * w);
        let normal = Vector3::new(-cos, -sin, 0.0);
        RibbonPoint {
            point,
            frame: Frame {
                tangent,
                normal,
                binormal: tangent.cross(&normal),
            },
            curvatures: Curvatures::new(self.kappa, 0.0, self.tau),
        }
    }
}

/// Dense uniform sample table of a ribbon with interpolation: cubic for the
/// curve, linear plus re-orthonormalization for the frame.
#[derive(Debug, Clone)]
pub struct SampledRibbon {
    step: f64,
    gamma: Vec<Point3<f64>>,
    frames: Vec<Frame>,
    curv: Vec<Curvatures>,
}

impl SampledRibbon {
    pub fn new(
        step: f64,
        gamma: Vec<Point3<f64>>,
        frames: Vec<Frame>,
        curv: Vec<Curvatures>,
    ) -> Result<Self> {
        if gamma.len() < 2 || gamma.len() != frames.len() || gamma.len() != curv.len() {
            return Err(Error::InvalidInput(
                "sampled ribbon needs >= 2 samples with matching columns".into(),
            ));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidInput("sample step must be positive".into()));
        }
        Ok(Self {
            step,
            gamma,
            frames,
            curv,
        })
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.step * (self.gamma.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn sample(&self, i: usize) -> RibbonPoint {
        RibbonPoint {
            point: self.gamma[i],
            frame: self.frames[i],
            curvatures: self.curv[i],
        }
    }

    pub fn eval(&self, s: f64) -> RibbonPoint {
        let n = self.gamma.len();
        let s = s.clamp(0.0, self.length());
        let u = s / self.step;
        let i = (u.floor() as usize).min(n - 2);
        let t = u - i as f64;

        // Cubic Lagrange stencil for the curve, clamped at the ends.
        let j = i.saturating_sub(1).min(n - 4);
        let tj = u - j as f64;
        let mut point = Point3::origin();
        for (k, w) in cubic_lagrange_weights(tj).into_iter().enumerate() {
            point += self.gamma[j + k].coords * w;
        }

        let f0 = &self.frames[i];
        let f1 = &self.frames[i + 1];
        let frame = Frame {
            tangent: f0.tangent.lerp(&f1.tangent, t),
            normal: f0.normal.lerp(&f1.normal, t),
            binormal: f0.binormal.lerp(&f1.binormal, t),
        }
        .orthonormalized();

        let c0 = &self.curv[i];
        let c1 = &self.curv[i + 1];
        let curvatures = Curvatures::new(
            c0.kappa_n + (c1.kappa_n - c0.kappa_n) * t,
            c0.kappa_g + (c1.kappa_g - c0.kappa_g) * t,
            c0.tau_g + (c1.tau_g - c0.tau_g) * t,
        );

        RibbonPoint {
            point: Point3::from(point.coords),
            frame,
            curvatures,
        }
    }

    /// CSV export: `s,gx,gy,gz,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kn,kg,tg` with one
    /// header row.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "s,gx,gy,gz,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kn,kg,tg")?;
        for i in 0..self.len() {
            let s = self.step * i as f64;
            let g = &self.gamma[i];
            let f = &self.frames[i];
            let c = &self.curv[i];
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                s,
                g.x,
                g.y,
                g.z,
                f.tangent.x,
                f.tangent.y,
                f.tangent.z,
                f.normal.x,
                f.normal.y,
                f.normal.z,
                f.binormal.x,
                f.binormal.y,
                f.binormal.z,
                c.kappa_n,
                c.kappa_g,
                c.tau_g
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut gamma = Vec::new();
        let mut frames = Vec::new();
        let mut curv = Vec::new();
        let mut svals = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('s') {
                continue;
            }
            let cols = parse_f64_row(line, 16, lineno + 1)?;
            svals.push(cols[0]);
            gamma.push(Point3::new(cols[1], cols[2], cols[3]));
            frames.push(
                Frame {
                    tangent: Vector3::new(cols[4], cols[5], cols[6]),
                    normal: Vector3::new(cols[7], cols[8], cols[9]),
                    binormal: Vector3::new(cols[10], cols[11], cols[12]),
                }
                .orthonormalized(),
            );
            curv.push(Curvatures::new(cols[13], cols[14], cols[15]));
        }
        if svals.len() < 2 {
            return Err(Error::Csv("ribbon csv has fewer than 2 rows".into()));
        }
        let step = svals[1] - svals[0];
        for w in svals.windows(2) {
            if ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs().max(1.0) {
                return Err(Error::Csv("ribbon csv s-column is not uniform".into()));
            }
        }
        Self::new(step, gamma, frames, curv)
    }
}

pub(crate) fn parse_f64_row(line: &str, want: usize, lineno: usize) -> Result<Vec<f64>> {
    let cols: std::result::Result<Vec<f64>, _> =
        line.split(',').map(|c| c.trim().parse::<f64>()).collect();
    match cols {
        Ok(v) if v.len() == want => Ok(v),
        Ok(v) => Err(Error::Csv(format!(
            "line {lineno}: expected {want} columns, got {}",
            v.len()
        ))),
        Err(e) => Err(Error::Csv(format!("line {lineno}: {e}"))),
    }
}

fn cubic_lagrange_weights(t: f64) -> [f64; 4] {
    // Lagrange basis on nodes 0,1,2,3 evaluated at t.
    [
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    ]
}

/// Integrate the frame system F' = F*M together with gamma' = T using the
/// classical fourth-order scheme, re-orthonormalizing the frame after every
/// step. `s_span` is the (start, end) arc-length interval passed to the
/// curvature callable.
pub fn evolve_frame<C: Fn(f64) -> Curvatures>(
    curvatures: C,
    frame0: &Frame,
    gamma0: &Point3<f64>,
    s_span: (f64, f64),
    h: f64,
) -> Result<SampledRibbon> {
    let (s0, s1) = s_span;
    if !(h > 0.0) || !(s1 > s0) {
        return Err(Error::InvalidInput(
            "evolve_frame needs h > 0 and a nonempty forward span".into(),
        ));
    }
    let steps = ((s1 - s0) / h).ceil() as usize;
    let h = (s1 - s0) / steps as f64;

    let eval = |s: f64| -> Result<Curvatures> {
        let c = curvatures(s);
        if !c.is_finite() {
            return Err(Error::NonFiniteCurvature { s });
        }
        Ok(c)
    };

    let mut state = EvolveState {
        gamma: *gamma0,
        frame: frame0.orthonormalized(),
    };
    let mut gamma = Vec::with_capacity(steps + 1);
    let mut frames = Vec::with_capacity(steps + 1);
    let mut curv = Vec::with_capacity(steps + 1);
    gamma.push(state.gamma);
    frames.push(state.frame);
    curv.push(eval(s0)?);

    for i in 0..steps {
        let s = s0 + i as f64 * h;
        let k1 = state.derivative(&eval(s)?);
        let k2 = state.shifted(&k1, 0.5 * h).derivative(&eval(s + 0.5 * h)?);
        let k3 = state.shifted(&k2, 0.5 * h).derivative(&eval(s + 0.5 * h)?);
        let k4 = state.shifted(&k3, h).derivative(&eval(s + h)?);
        state = state.shifted(&k1.combine(&k2, &k3, &k4), h);
        state.frame = state.frame.orthonormalized();
        gamma.push(state.gamma);
        frames.push(state.frame);
        curv.push(eval(s + h)?);
    }

    SampledRibbon::new(h, gamma, frames, curv)
}

#[derive(Clone, Copy)]
struct EvolveState {
    gamma: Point3<f64>,
    frame: Frame,
}

#[derive(Clone, Copy)]
struct EvolveDeriv {
    dg: Vector3<f64>,
    dt: Vector3<f64>,
    dn: Vector3<f64>,
    db: Vector3<f64>,
}

impl EvolveState {
    fn derivative(&self, c: &Curvatures) -> EvolveDeriv {
        let (dt, dn, db) = frame_derivative(&self.frame, c);
        EvolveDeriv {
            dg: self.frame.tangent,
            dt,
            dn,
            db,
        }
    }

    fn shifted(&self, d: &EvolveDeriv, h: f64) -> Self {
        Self {
            gamma: self.gamma + d.dg * h,
            frame: Frame {
                tangent: self.frame.tangent + d.dt * h,
                normal: self.frame.normal + d.dn * h,
                binormal: self.frame.binormal + d.db * h,
            },
        }
    }
}

impl EvolveDeriv {
    fn combine(&self, k2: &Self, k3: &Self, k4: &Self) -> Self {
        let mix = |a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, d: &Vector3<f64>| {
            (a + b * 2.0 + c * 2.0 + d) / 6.0
        };
        Self {
            dg: mix(&self.dg, &k2.dg, &k3.dg, &k4.dg),
            dt: mix(&self.dt, &k2.dt, &k3.dt, &k4.dt),
            dn: mix(&self.dn, &k2.dn, &k3.dn, &k4.dn),
            db: mix(&self.db, &k2.db, &k3.db, &k4.db),
        }
    }
}

/// Frenet-style framing of a densely sampled arc-length curve: the normal is
/// T'/|T'| wherever the turn rate is resolvable, which makes kappa_g vanish
/// there; across straight stretches the normal is carried forward by the
/// double-reflection parallel transport, which keeps kappa_g at zero as well.
pub fn frenet_ribbon(s: &[f64], points: &[Point3<f64>]) -> Result<Ribbon> {
    let n = points.len();
    if n < 4 {
        return Err(Error::TooFewSamples { got: n, need: 4 });
    }
    if s.len() != n {
        return Err(Error::InvalidInput(
            "arc-length and point arrays differ in length".into(),
        ));
    }
    let h = s[1] - s[0];
    if !(h > 0.0) {
        return Err(Error::InvalidInput("arc length must be ascending".into()));
    }
    for w in s.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-6 * h {
            return Err(Error::InvalidInput(
                "curve must be uniformly sampled in arc length".into(),
            ));
        }
    }

    // Chord directions; repeated points and corners are rejected here.
    let mut chords = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let d = points[i + 1] - points[i];
        let len = d.norm();
        if len < 1e-14 * h.max(1.0) {
            return Err(Error::InvalidInput(format!(
                "repeated curve sample near s = {}",
                s[i]
            )));
        }
        chords.push(d / len);
    }
    for i in 0..chords.len() - 1 {
        let dot = chords[i].dot(&chords[i + 1]).clamp(-1.0, 1.0);
        let angle = dot.acos();
        if angle > 1e-3 {
            return Err(Error::CornerDetected {
                s: s[i + 1],
                angle,
            });
        }
    }

    let tangent_raw = derive_samples(points, h);
    let tangents: Vec<Vector3<f64>> = tangent_raw.iter().map(|t| t.normalize()).collect();
    let tangent_pts: Vec<Point3<f64>> = tangents.iter().map(|t| Point3::from(*t)).collect();
    let tprime = derive_samples(&tangent_pts, h);

    const STRAIGHT_TOL: f64 = 1e-8;
    let first_curved = tprime.iter().position(|v| v.norm() > STRAIGHT_TOL);

    let mut normals = vec![Vector3::zeros(); n];
    match first_curved {
        None => {
            // Fully straight: carry an arbitrary perpendicular forward.
            normals[0] = perpendicular_unit(&tangents[0]);
            for i in 1..n {
                normals[i] = transport_normal(
                    &points[i - 1],
                    &tangents[i - 1],
                    &normals[i - 1],
                    &points[i],
                    &tangents[i],
                );
            }
        }
        Some(j) => {
            normals[j] = frenet_normal(&tprime[j], &tangents[j]);
            for i in (0..j).rev() {
                normals[i] = transport_normal(
                    &points[i + 1],
                    &tangents[i + 1],
                    &normals[i + 1],
                    &points[i],
                    &tangents[i],
                );
            }
            for i in j + 1..n {
                normals[i] = if tprime[i].norm() > STRAIGHT_TOL {
                    frenet_normal(&tprime[i], &tangents[i])
                } else {
                    transport_normal(
                        &points[i - 1],
                        &tangents[i - 1],
                        &normals[i - 1],
                        &points[i],
                        &tangents[i],
                    )
                };
            }
        }
    }

    let frames: Vec<Frame> = (0..n)
        .map(|i| {
            Frame {
                tangent: tangents[i],
                normal: normals[i],
                binormal: tangents[i].cross(&normals[i]),
            }
            .orthonormalized()
        })
        .collect();

    let normal_pts: Vec<Point3<f64>> = frames.iter().map(|f| Point3::from(f.normal)).collect();
    let nprime = derive_samples(&normal_pts, h);

    let curv: Vec<Curvatures> = (0..n)
        .map(|i| {
            let f = &frames[i];
            Curvatures::new(
                tprime[i].dot(&f.normal),
                -tprime[i].dot(&f.binormal),
                nprime[i].dot(&f.binormal),
            )
        })
        .collect();

    Ok(Ribbon::Sampled(SampledRibbon::new(
        h,
        points.to_vec(),
        frames,
        curv,
    )?))
}

fn frenet_normal(tprime: &Vector3<f64>, tangent: &Vector3<f64>) -> Vector3<f64> {
    let n = tprime - tangent * tangent.dot(tprime);
    n.normalize()
}

/// Double-reflection step of the rotation-minimizing frame update.
fn transport_normal(
    p0: &Point3<f64>,
    t0: &Vector3<f64>,
    n0: &Vector3<f64>,
    p1: &Point3<f64>,
    t1: &Vector3<f64>,
) -> Vector3<f64> {
    let v1 = p1 - p0;
    let c1 = v1.dot(&v1);
    if c1 == 0.0 {
        return *n0;
    }
    let rl_n = n0 - v1 * (2.0 / c1 * v1.dot(n0));
    let rl_t = t0 - v1 * (2.0 / c1 * v1.dot(t0));
    let v2 = t1 - rl_t;
    let c2 = v2.dot(&v2);
    if c2 < 1e-30 {
        return rl_n;
    }
    let n1 = rl_n - v2 * (2.0 / c2 * v2.dot(&rl_n));
    (n1 - t1 * t1.dot(&n1)).normalize()
}

/// Finite-difference derivative of a uniformly sampled vector series:
/// fourth-order central differences inside, third-order one-sided formulas at
/// the two samples on each end.
fn derive_samples(p: &[Point3<f64>], h: f64) -> Vec<Vector3<f64>> {
    let n = p.len();
    let mut out = vec![Vector3::zeros(); n];
    let v = |i: usize| p[i].coords;
    for (i, o) in out.iter_mut().enumerate() {
        *o = if i >= 2 && i + 2 < n {
            (-v(i + 2) + v(i + 1) * 8.0 - v(i - 1) * 8.0 + v(i - 2)) / (12.0 * h)
        } else if i == 0 {
            (v(0) * -11.0 + v(1) * 18.0 - v(2) * 9.0 + v(3) * 2.0) / (6.0 * h)
        } else if i == 1 {
            (v(0) * -2.0 - v(1) * 3.0 + v(2) * 6.0 - v(3)) / (6.0 * h)
        } else if i + 2 == n {
            -(v(n - 1) * -2.0 - v(n - 2) * 3.0 + v(n - 3) * 6.0 - v(n - 4)) / (6.0 * h)
        } else {
            -(v(n - 1) * -11.0 + v(n - 2) * 18.0 - v(n - 3) * 9.0 + v(n - 4) * 2.0) / (6.0 * h)
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::Rotation3;

    const PI: f64 = std::f64::consts::PI;

    fn circle_frame0(radius: f64) -> (Frame, Point3<f64>) {
        let frame = Frame::new(Vector3::y(), -Vector3::x()).unwrap();
        (frame, Point3::new(radius, 0.0, 0.0))
    }

    #[test]
    fn derivative_zero_curvatures() {
        let f = Frame::identity();
        let (dt, dn, db) = frame_derivative(&f, &Curvatures::new(0.0, 0.0, 0.0));
        assert_eq!(dt, Vector3::zeros());
        assert_eq!(dn, Vector3::zeros());
        assert_eq!(db, Vector3::zeros());
    }

    #[test]
    fn derivative_pure_normal_curvature() {
        let f = Frame::identity();
        let (dt, dn, db) = frame_derivative(&f, &Curvatures::new(1.0, 0.0, 0.0));
        assert_eq!(dt, Vector3::y());
        assert_eq!(dn, -Vector3::x());
        assert_eq!(db, Vector3::zeros());
    }

    #[test]
    fn derivative_geodesic_and_torsion() {
        // kn=0, kg=2, tg=3 against the system matrix worked out by hand:
        // dT = -2 B, dN = 3 B, dB = 2 T - 3 N.
        let f = Frame::identity();
        let (dt, dn, db) = frame_derivative(&f, &Curvatures::new(0.0, 2.0, 3.0));
        assert_eq!(dt, Vector3::z() * -2.0);
        assert_eq!(dn, Vector3::z() * 3.0);
        assert_eq!(db, Vector3::x() * 2.0 - Vector3::y() * 3.0);
    }

    #[test]
    fn derivative_is_tangent_to_the_frame() {
        // <T,dT> = <N,dN> = <B,dB> = 0 for any curvatures.
        let f = Frame::from_tangent(Vector3::new(0.3, -0.4, 0.8));
        for c in [
            Curvatures::new(0.7, -1.3, 2.1),
            Curvatures::new(-5.0, 0.0, 0.1),
        ] {
            let (dt, dn, db) = frame_derivative(&f, &c);
            assert_abs_diff_eq!(f.tangent.dot(&dt), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(f.normal.dot(&dn), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(f.binormal.dot(&db), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn evolve_constant_curvature_closes_circles() {
        for radius in [0.5, 1.0, 10.0] {
            let (frame0, gamma0) = circle_frame0(radius);
            let len = 2.0 * PI * radius;
            let ribbon = evolve_frame(
                |_| Curvatures::new(1.0 / radius, 0.0, 0.0),
                &frame0,
                &gamma0,
                (0.0, len),
                len / 1000.0,
            )
            .unwrap();
            let end = ribbon.eval(ribbon.length()).point;
            assert!(
                (end - gamma0).norm() < 1e-8 * radius,
                "closure gap {} for radius {}",
                (end - gamma0).norm(),
                radius
            );
        }
    }

    #[test]
    fn evolve_zero_curvature_is_a_straight_line() {
        let frame0 = Frame::from_tangent(Vector3::new(1.0, 2.0, -0.5));
        let gamma0 = Point3::new(0.3, 0.1, -2.0);
        let ribbon = evolve_frame(
            |_| Curvatures::default(),
            &frame0,
            &gamma0,
            (0.0, 5.0),
            0.05,
        )
        .unwrap();
        for i in 0..ribbon.len() {
            let s = 0.05 * i as f64;
            let expect = gamma0 + frame0.tangent * s;
            assert!((ribbon.sample(i).point - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn evolve_helix_matches_closed_form() {
        let (kappa, tau) = (2.0, 0.7);
        let helix = Ribbon::helix(kappa, tau, 4.0).unwrap();
        let start = helix.eval(0.0);
        let ribbon = evolve_frame(
            |_| Curvatures::new(kappa, 0.0, tau),
            &start.frame,
            &start.point,
            (0.0, 4.0),
            4.0 / 4000.0,
        )
        .unwrap();
        for i in (0..ribbon.len()).step_by(200) {
            let s = ribbon.step() * i as f64;
            let expect = helix.eval(s).point;
            assert!(
                (ribbon.sample(i).point - expect).norm() < 1e-8,
                "helix deviation {} at s={}",
                (ribbon.sample(i).point - expect).norm(),
                s
            );
        }
        // Implied cylinder radius and pitch.
        if let Ribbon::Helix(h) = &helix {
            let w2 = kappa * kappa + tau * tau;
            assert_relative_eq!(h.radius(), kappa / w2, epsilon = 1e-12);
            assert_relative_eq!(h.pitch(), 2.0 * PI * tau / w2, epsilon = 1e-12);
        }
    }

    #[test]
    fn evolve_preserves_orthonormality() {
        let (frame0, gamma0) = circle_frame0(1.0);
        let ribbon = evolve_frame(
            |s| Curvatures::new(1.0 + 0.3 * (3.0 * s).sin(), 0.2 * s.cos(), 0.5),
            &frame0,
            &gamma0,
            (0.0, 2.0 * PI),
            2.0 * PI / 1000.0,
        )
        .unwrap();
        let worst = (0..ribbon.len())
            .map(|i| ribbon.sample(i).frame.orthonormality_defect())
            .fold(0.0, f64::max);
        assert!(worst < 1e-9, "orthonormality defect {worst}");
    }

    #[test]
    fn evolve_is_equivariant_under_rigid_motions() {
        let rot = Rotation3::from_euler_angles(0.3, -1.1, 0.7);
        let shift = Vector3::new(1.0, -2.0, 0.5);
        let curv = |s: f64| Curvatures::new(1.0 + 0.2 * s.sin(), 0.1, 0.4);
        let (frame0, gamma0) = circle_frame0(1.0);

        let base = evolve_frame(curv, &frame0, &gamma0, (0.0, 3.0), 3e-3).unwrap();
        let moved = evolve_frame(
            curv,
            &frame0.rotated(&rot),
            &(rot * gamma0 + shift),
            (0.0, 3.0),
            3e-3,
        )
        .unwrap();
        for i in (0..base.len()).step_by(100) {
            let expect = rot * base.sample(i).point + shift;
            assert!(
                (moved.sample(i).point - expect).norm() < 1e-9,
                "equivariance gap {}",
                (moved.sample(i).point - expect).norm()
            );
        }
    }

    #[test]
    fn evolve_rejects_non_finite_curvature() {
        let (frame0, gamma0) = circle_frame0(1.0);
        let err = evolve_frame(
            |s| Curvatures::new(if s > 0.5 { f64::NAN } else { 1.0 }, 0.0, 0.0),
            &frame0,
            &gamma0,
            (0.0, 1.0),
            0.01,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteCurvature { .. }));
    }

    fn sampled_circle(radius: f64, angle: f64, n: usize) -> (Vec<f64>, Vec<Point3<f64>>) {
        let length = radius * angle;
        let s: Vec<f64> = (0..n).map(|i| length * i as f64 / (n - 1) as f64).collect();
        let pts = s
            .iter()
            .map(|&si| {
                let th = si / radius;
                Point3::new(radius * th.cos(), radius * th.sin(), 0.0)
            })
            .collect();
        (s, pts)
    }

    #[test]
    fn frenet_circle_recovers_inward_normal_and_curvature() {
        let (s, pts) = sampled_circle(1.0, 2.0 * PI, 12001);
        let ribbon = frenet_ribbon(&s, &pts).unwrap();
        let Ribbon::Sampled(r) = &ribbon else {
            panic!("expected sampled ribbon")
        };
        for i in (0..r.len()).step_by(500) {
            let p = r.sample(i);
            let inward = -(p.point.coords.normalize());
            assert!((p.frame.normal - inward).norm() < 1e-5);
            assert_abs_diff_eq!(p.curvatures.kappa_n, 1.0, epsilon = 1e-6);
            assert_abs_diff_eq!(p.curvatures.kappa_g, 0.0, epsilon = 1e-8);
            assert_abs_diff_eq!(p.curvatures.tau_g, 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn frenet_quarter_circle_radius_two() {
        let (s, pts) = sampled_circle(2.0, 0.5 * PI, 4001);
        let ribbon = frenet_ribbon(&s, &pts).unwrap();
        let Ribbon::Sampled(r) = &ribbon else {
            panic!("expected sampled ribbon")
        };
        for i in 0..r.len() {
            assert_abs_diff_eq!(r.sample(i).curvatures.kappa_n, 0.5, epsilon = 1e-6);
        }
    }

    #[test]
    fn frenet_straight_segment_transports_a_constant_normal() {
        let n = 64;
        let s: Vec<f64> = (0..n).map(|i| i as f64 * 0.1).collect();
        let dir = Vector3::new(1.0, 1.0, 0.5).normalize();
        let pts: Vec<Point3<f64>> = s.iter().map(|&si| Point3::origin() + dir * si).collect();
        let ribbon = frenet_ribbon(&s, &pts).unwrap();
        let Ribbon::Sampled(r) = &ribbon else {
            panic!("expected sampled ribbon")
        };
        let n0 = r.sample(0).frame.normal;
        for i in 0..r.len() {
            let p = r.sample(i);
            assert!((p.frame.normal - n0).norm() < 1e-9);
            assert_abs_diff_eq!(p.curvatures.kappa_n, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(p.curvatures.kappa_g, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(p.curvatures.tau_g, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn frenet_rejects_corners_and_short_input() {
        let s: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(2.0, 1.0, 0.0),
            Point3::new(2.0, 2.0, 0.0),
        ];
        assert!(matches!(
            frenet_ribbon(&s, &pts).unwrap_err(),
            Error::CornerDetected { .. }
        ));
        assert!(matches!(
            frenet_ribbon(&s[..3], &pts[..3]).unwrap_err(),
            Error::TooFewSamples { .. }
        ));
    }

    #[test]
    fn sampled_ribbon_tangent_consistent_with_curve() {
        // gamma' ~ T within 1e-6 * (1 + |kappa| h) on an evolved circle,
        // with a fourth-order difference so the check probes the ribbon and
        // not the difference formula.
        let (frame0, gamma0) = circle_frame0(1.0);
        let r = evolve_frame(
            |_| Curvatures::new(1.0, 0.0, 0.0),
            &frame0,
            &gamma0,
            (0.0, 2.0 * PI),
            2.0 * PI / 2000.0,
        )
        .unwrap();
        let h = r.step();
        for i in 2..r.len() - 2 {
            let fd = (-r.sample(i + 2).point.coords + r.sample(i + 1).point.coords * 8.0
                - r.sample(i - 1).point.coords * 8.0
                + r.sample(i - 2).point.coords)
                / (12.0 * h);
            let tol = 1e-6 * (1.0 + h);
            assert!((fd - r.sample(i).frame.tangent).norm() < tol);
        }
    }

    #[test]
    fn sampled_ribbon_frame_ode_consistency() {
        // Finite differences of (T,N,B) reproduce the frame system within
        // discretization error.
        let (frame0, gamma0) = circle_frame0(1.0);
        let r = evolve_frame(
            |s| Curvatures::new(1.0, 0.2 * s.sin(), 0.3),
            &frame0,
            &gamma0,
            (0.0, 2.0),
            2.0 * PI / 4000.0,
        )
        .unwrap();
        let h = r.step();
        for i in (1..r.len() - 1).step_by(37) {
            let prev = r.sample(i - 1);
            let next = r.sample(i + 1);
            let here = r.sample(i);
            let (dt, dn, db) = frame_derivative(&here.frame, &here.curvatures);
            let fd_t = (next.frame.tangent - prev.frame.tangent) / (2.0 * h);
            let fd_n = (next.frame.normal - prev.frame.normal) / (2.0 * h);
            let fd_b = (next.frame.binormal - prev.frame.binormal) / (2.0 * h);
            assert!((fd_t - dt).norm() < 5.0 * h * h + 1e-9);
            assert!((fd_n - dn).norm() < 5.0 * h * h + 1e-9);
            assert!((fd_b - db).norm() < 5.0 * h * h + 1e-9);
        }
    }

    #[test]
    fn csv_round_trip() {
        let (frame0, gamma0) = circle_frame0(1.0);
        let r = evolve_frame(
            |_| Curvatures::new(1.0, 0.0, 0.0),
            &frame0,
            &gamma0,
            (0.0, 1.0),
            0.01,
        )
        .unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let back = SampledRibbon::read_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back.len(), r.len());
        for i in 0..r.len() {
            assert_eq!(back.sample(i).point, r.sample(i).point);
            assert_eq!(back.sample(i).curvatures, r.sample(i).curvatures);
        }
    }
}
