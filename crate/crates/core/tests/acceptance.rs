//! Acceptance suite: one test per acceptance criterion, each printing a
//! PASS line (visible with `--nocapture`) once its assertions hold.

use std::time::Instant;

use nalgebra::{Point3, Vector3};

use guldin_core::body::{
    cap_volume_ball, cross_section, halfspace_volume, monte_carlo_volume, section_area,
    BoundingBox, ConvexBody, SectionPlane, SliceQuad,
};
use guldin_core::curve::{
    boundary_approach_angle, ellipsoid_centroid_curve, trace_centroid_curve, CentroidCurveTrace,
    StopReason, TraceOptions,
};
use guldin_core::frames::{Frame, Ribbon};
use guldin_core::rod::{
    bent_rod_centroid, profile_moments, ProfileShape, RevolutionMoments, RodSpec,
    revolution_segment_centroid,
};
use guldin_core::surface::{
    area_lower_bound, equality_defect, swept_mesh_area_refined, BoundaryTrace,
};
use guldin_core::volume::{
    body_centroid_along_ribbon, centroid_curve_volume, disk_section, pappus_volume, SliceSeries,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;
const TAU: f64 = 2.0 * std::f64::consts::PI;

fn fig3_ellipsoid() -> ConvexBody {
    ConvexBody::ellipsoid(Point3::origin(), [1.0, 0.625, 0.5]).unwrap()
}

fn fig3_sup_error(trace: &CentroidCurveTrace, p0: &Point3<f64>) -> f64 {
    let mut sup = 0.0f64;
    let mut in_band = 0usize;
    for t in &trace.samples {
        let x = t.gamma.x;
        if !(0.05..=0.8).contains(&x) {
            continue;
        }
        in_band += 1;
        let (y, z) = ellipsoid_centroid_curve(1.0, 0.625, 0.5, p0, x).unwrap();
        sup = sup.max((t.gamma.y - y).abs()).max((t.gamma.z - z).abs());
    }
    assert!(in_band > 100, "trace has too few samples in the x band");
    sup
}

/// Criterion 1: tracing from (0.8, -0.3, 0.18) in the (1, 0.625, 0.5)
/// ellipsoid at h = 1e-3 matches the closed-form centroid curve to 1e-4 in
/// sup norm over x in [0.05, 0.8], the error drops by at least 8x per
/// halving of h (twice), and the h = 1e-3 trace runs in under a minute.
#[test]
fn criterion_1_fig3_reproduction() {
    let body = fig3_ellipsoid();
    let p0 = Point3::new(0.8, -0.3, 0.18);
    let run = |h: f64| {
        let mut opts = TraceOptions::for_body(&body);
        opts.step = h;
        opts.delta_max = Some(0.62); // carries the trace past x = 0.05
        opts.two_sided = false;
        trace_centroid_curve(&body, &p0, &opts).unwrap()
    };

    let started = Instant::now();
    let trace1 = run(1e-3);
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "h = 1e-3 trace took {elapsed:?}"
    );

    let e1 = fig3_sup_error(&trace1, &p0);
    assert!(e1 < 1e-4, "sup error {e1:.3e} at h = 1e-3");

    let e2 = fig3_sup_error(&run(5e-4), &p0);
    let e3 = fig3_sup_error(&run(2.5e-4), &p0);
    assert!(
        e1 >= 8.0 * e2,
        "first halving reduced the error only {:.2}x ({e1:.3e} -> {e2:.3e})",
        e1 / e2
    );
    assert!(
        e2 >= 8.0 * e3,
        "second halving reduced the error only {:.2}x ({e2:.3e} -> {e3:.3e})",
        e2 / e3
    );
    println!(
        "criterion 1 (fig. 3 reproduction): PASS  sup errors {e1:.3e} / {e2:.3e} / {e3:.3e}, \
         h=1e-3 runtime {:.2}s",
        elapsed.as_secs_f64()
    );
}

/// Criterion 2: half-space volumes of the unit ball match the cap law
/// pi/3 (1-r)^2 (2+r) to 1e-8 absolute at r = 0.1 .. 0.9.
#[test]
fn criterion_2_ball_cap_law() {
    let ball = ConvexBody::unit_ball();
    let quad = SliceQuad::default();
    let mut worst = 0.0f64;
    for r in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let v = halfspace_volume(&ball, &-Vector3::z(), &Point3::new(0.0, 0.0, r), &quad)
            .unwrap();
        let want = cap_volume_ball(r).unwrap();
        let err = (v - want).abs();
        assert!(err < 1e-8, "cap volume at r = {r}: error {err:.3e}");
        worst = worst.max(err);
    }
    println!("criterion 2 (ball cap law): PASS  worst abs error {worst:.3e}");
}

/// Criterion 3: the torus (R = 1, r = 0.3) comes out at 2 pi^2 R r^2 both
/// from the plain area integral along the centroid circle and from the
/// corrected slice formula along the off-center circle R' = 1.2, all within
/// 1e-8 relative.
#[test]
fn criterion_3_pappus_classic_and_correction() {
    let closed_form = 2.0 * PI * PI * 0.09;

    let centroid_circle =
        Ribbon::circle(Point3::origin(), Vector3::x(), Vector3::y(), 1.0).unwrap();
    let v1 = centroid_curve_volume(&centroid_circle, |_| PI * 0.09, 1e-11).unwrap();

    let off_circle =
        Ribbon::circle(Point3::origin(), Vector3::x(), Vector3::y(), 1.2).unwrap();
    let series = SliceSeries::from_sections(&off_circle, 64, 4, |_| {
        disk_section(0.3, 64).translated(0.2, 0.0)
    })
    .unwrap();
    let v2 = pappus_volume(&series).unwrap();

    assert!((v1 - closed_form).abs() / closed_form < 1e-8);
    assert!((v2 - closed_form).abs() / closed_form < 1e-8);
    assert!((v1 - v2).abs() / closed_form < 1e-8);
    println!(
        "criterion 3 (classic + corrected torus): PASS  {v1:.12} vs {v2:.12} vs {closed_form:.12}"
    );
}

/// Criterion 4: two toroidal bodies on the same unit circle, one with
/// varying disks and one with equal-area rotating ellipses, have the same
/// area-integral volume to 1e-8 relative and each agrees with its own
/// fixed-seed Monte-Carlo estimate within four standard errors.
#[test]
fn criterion_4_fig1_equal_volumes() {
    let circle = Ribbon::circle(Point3::origin(), Vector3::x(), Vector3::y(), 1.0).unwrap();
    let rho = |s: f64| 0.25 + 0.1 * (4.0 * s).sin();
    let aspect = 1.3;
    let spin = 2.0;

    let disks =
        SliceSeries::from_sections(&circle, 64, 4, |s| disk_section(rho(s), 128)).unwrap();
    let ellipses = SliceSeries::from_sections(&circle, 64, 4, |s| {
        guldin_core::volume::ellipse_section(aspect * rho(s), rho(s) / aspect, 128)
            .rotated(spin * s)
    })
    .unwrap();
    let v_disks = pappus_volume(&disks).unwrap();
    let v_ellipses = pappus_volume(&ellipses).unwrap();
    assert!(
        (v_disks - v_ellipses).abs() / v_disks < 1e-8,
        "volumes differ: {v_disks} vs {v_ellipses}"
    );

    let bbox = BoundingBox::new(
        Point3::new(-1.46, -1.46, -0.46),
        Point3::new(1.46, 1.46, 0.46),
    )
    .unwrap();
    let est_disks = monte_carlo_volume(
        |p| {
            let d = (p.x * p.x + p.y * p.y).sqrt();
            let s = p.y.atan2(p.x).rem_euclid(TAU);
            let u = 1.0 - d;
            u * u + p.z * p.z <= rho(s).powi(2)
        },
        &bbox,
        20_240_817,
        10_000_000,
    )
    .unwrap();
    assert!(
        (est_disks.volume - v_disks).abs() < 4.0 * est_disks.std_error,
        "disk toroid: {} vs mc {} (se {})",
        v_disks,
        est_disks.volume,
        est_disks.std_error
    );

    let est_ellipses = monte_carlo_volume(
        |p| {
            let d = (p.x * p.x + p.y * p.y).sqrt();
            let s = p.y.atan2(p.x).rem_euclid(TAU);
            let u = 1.0 - d;
            let v = p.z;
            let th = spin * s;
            let (sin, cos) = th.sin_cos();
            let ul = u * cos + v * sin;
            let vl = -u * sin + v * cos;
            let (a, b) = (aspect * rho(s), rho(s) / aspect);
            (ul / a).powi(2) + (vl / b).powi(2) <= 1.0
        },
        &bbox,
        20_240_818,
        10_000_000,
    )
    .unwrap();
    assert!(
        (est_ellipses.volume - v_ellipses).abs() < 4.0 * est_ellipses.std_error,
        "ellipse toroid: {} vs mc {} (se {})",
        v_ellipses,
        est_ellipses.volume,
        est_ellipses.std_error
    );
    println!(
        "criterion 4 (equal-volume toroids): PASS  {v_disks:.9} == {v_ellipses:.9}, \
         mc {:.9} / {:.9}",
        est_disks.volume, est_ellipses.volume
    );
}

fn check_trace_invariants(
    body: &ConvexBody,
    trace: &CentroidCurveTrace,
    step: f64,
    label: &str,
) {
    let rb = body.bounding_radius();
    // Strictly increasing delta.
    for w in trace.samples.windows(2) {
        assert!(
            w[1].delta > w[0].delta,
            "{label}: delta not increasing at s = {}",
            w[1].s
        );
    }
    // d(delta)/ds matches the section area within 2% at interior samples
    // with uniform neighbors.
    for i in 1..trace.samples.len() - 1 {
        let lo = &trace.samples[i - 1];
        let mid = &trace.samples[i];
        let hi = &trace.samples[i + 1];
        if (hi.s - mid.s - step).abs() > 1e-9 || (mid.s - lo.s - step).abs() > 1e-9 {
            continue;
        }
        let slope = (hi.delta - lo.delta) / (hi.s - lo.s);
        assert!(
            (slope - mid.area).abs() <= 0.02 * mid.area,
            "{label}: delta slope {slope} vs area {} at s = {}",
            mid.area,
            mid.s
        );
    }
    // Per-sample centroid residual from the converged cut, plus an
    // independent cross-section check every 10th sample.
    for (i, t) in trace.samples.iter().enumerate() {
        if t.delta == 0.0 {
            continue; // boundary anchor of a boundary-start trace
        }
        assert!(
            t.residual < 1e-6 * rb,
            "{label}: residual {:.3e} at s = {}",
            t.residual,
            t.s
        );
        if i % 10 == 0 {
            let plane = SectionPlane::new(t.normal, t.gamma).unwrap();
            let profile = cross_section(body, &plane, 256).unwrap();
            assert!(
                (profile.centroid - t.gamma).norm() < 1e-6 * rb,
                "{label}: recomputed centroid off by {:.3e} at s = {}",
                (profile.centroid - t.gamma).norm(),
                t.s
            );
        }
    }
}

/// Criterion 5: ellipsoid and ball traces have strictly increasing delta,
/// delta' = A within 2%, per-sample centroid residuals below 1e-6 times the
/// bounding radius, and meet the boundary within 0.02 rad of the surface
/// normal at delta = 1e-6.
#[test]
fn criterion_5_trace_invariants() {
    let body = fig3_ellipsoid();
    let p0 = Point3::new(0.4, -0.3 * 0.5f64.powf(2.56), 0.011_25);
    let mut opts = TraceOptions::for_body(&body);
    opts.step = 1e-3;
    opts.delta_min = 1e-6;
    opts.delta_max = Some(0.4);
    let trace = trace_centroid_curve(&body, &p0, &opts).unwrap();
    assert_eq!(trace.stop_backward, StopReason::ReachedBoundary);
    check_trace_invariants(&body, &trace, opts.step, "ellipsoid");
    let angle = boundary_approach_angle(&trace, &body).unwrap();
    assert!(angle < 0.02, "ellipsoid approach angle {angle}");

    let ball = ConvexBody::unit_ball();
    let mut opts = TraceOptions::for_body(&ball);
    opts.step = 1e-3;
    opts.delta_min = 1e-6;
    opts.delta_max = Some(0.9);
    let ball_trace = trace_centroid_curve(&ball, &Point3::new(0.0, 0.0, 0.5), &opts).unwrap();
    check_trace_invariants(&ball, &ball_trace, opts.step, "ball");
    let ball_angle = boundary_approach_angle(&ball_trace, &ball).unwrap();
    assert!(ball_angle < 0.02, "ball approach angle {ball_angle}");

    println!(
        "criterion 5 (trace invariants): PASS  approach angles {angle:.2e} / {ball_angle:.2e}, \
         {} + {} samples",
        trace.samples.len(),
        ball_trace.samples.len()
    );
}

/// Criterion 6: the quarter-circle disk rod (R = 1, r = 0.1) has centroid
/// (2/pi + 0.01/(2 pi)) (1, 1, 0) by the closed form, equal to the slice
/// integral within 1e-8 and to Monte-Carlo within 4 sigma; the volume is
/// A*L exactly.
#[test]
fn criterion_6_rod_theorem() {
    let ribbon = Ribbon::circular_arc(
        Point3::origin(),
        Vector3::x(),
        Vector3::y(),
        1.0,
        PI / 2.0,
    )
    .unwrap();
    let profile = profile_moments(ProfileShape::Disk { radius: 0.1 }).unwrap();
    let rod = RodSpec::new(ribbon.clone(), profile.clone(), false).unwrap();
    let (volume, c) = bent_rod_centroid(&rod).unwrap();

    assert_eq!(volume, profile.area * ribbon.length());
    assert!((volume - PI * 0.01 * PI / 2.0).abs() < 1e-15);
    let want = 2.0 / PI + 0.01 / (2.0 * PI);
    assert!((c.x - want).abs() < 1e-12 && (c.y - want).abs() < 1e-12 && c.z.abs() < 1e-14);

    let series =
        SliceSeries::from_sections(&ribbon, 64, 4, |_| profile.slice_section(128)).unwrap();
    let c_series = body_centroid_along_ribbon(&series).unwrap();
    assert!(
        (c - c_series).norm() < 1e-8,
        "closed form vs slice integral: {:.3e}",
        (c - c_series).norm()
    );

    let bbox = BoundingBox::new(
        Point3::new(-0.15, -0.15, -0.15),
        Point3::new(1.15, 1.15, 0.15),
    )
    .unwrap();
    let est = monte_carlo_volume(
        |p| {
            let th = p.y.atan2(p.x);
            if !(0.0..=PI / 2.0).contains(&th) {
                return false;
            }
            let d = (p.x * p.x + p.y * p.y).sqrt();
            let u = 1.0 - d;
            u * u + p.z * p.z <= 0.01
        },
        &bbox,
        19_300_603,
        10_000_000,
    )
    .unwrap();
    assert!((est.volume - volume).abs() < 4.0 * est.std_error);
    let mc = est.mean_point.unwrap();
    let se = est.point_std_error.unwrap();
    for i in 0..3 {
        assert!(
            (c[i] - mc[i]).abs() < 4.0 * se[i].max(1e-9),
            "component {i}: {} vs mc {} (se {})",
            c[i],
            mc[i],
            se[i]
        );
    }
    println!(
        "criterion 6 (bent rod): PASS  c = ({:.9}, {:.9}, {:.1e}), vol = {volume:.12}",
        c.x, c.y, c.z
    );
}

/// Criterion 7: for a symmetric polygon generator, the revolution-segment
/// centroid equals the equivalent circular-arc rod centroid within
/// 1e-10 r_bar, and the parallel-axis identity holds against direct polygon
/// moments about the axis to 1e-12 relative.
#[test]
fn criterion_7_revolution_segment() {
    // Hexagonal generator in the (x, z) plane, symmetric about z = 0,
    // centroid on the x-axis.
    let raw: Vec<(f64, f64)> = vec![
        (1.0, 0.0),
        (1.15, -0.2),
        (1.45, -0.2),
        (1.6, 0.0),
        (1.45, 0.2),
        (1.15, 0.2),
    ];
    let generator = profile_moments(ProfileShape::Polygon {
        vertices: raw.clone(),
    })
    .unwrap();
    let r_bar = 1.3;
    // The recentered generator has its centroid at the origin; its centroid
    // distance from the rotation axis is r_bar by construction.
    let moments = RevolutionMoments {
        area: generator.area,
        r_bar,
        i_zbar: generator.iv,
    };

    // Equivalent rod: u = r_bar - x, v = z maps the generator into the rod
    // frame of the circular arc (the u mirror flips orientation, which the
    // polygon constructor repairs).
    let rod_profile = profile_moments(ProfileShape::Polygon {
        vertices: raw.iter().map(|&(x, z)| (r_bar - x, z)).collect(),
    })
    .unwrap();

    let alpha = 1.9;
    let arc = Ribbon::circular_arc(Point3::origin(), Vector3::x(), Vector3::y(), r_bar, alpha)
        .unwrap();
    let rod = RodSpec::new(arc, rod_profile, false).unwrap();
    let (_, c_rod) = bent_rod_centroid(&rod).unwrap();
    let c_rev = revolution_segment_centroid(&moments, alpha).unwrap();
    assert!(
        (c_rod - c_rev).norm() < 1e-10 * r_bar,
        "rod vs revolution: {:.3e}",
        (c_rod - c_rev).norm()
    );

    // Parallel-axis identity with both sides from vertex sums: the second
    // moment of the raw polygon about x = 0 equals A r_bar^2 + I_zbar.
    let n = raw.len();
    let mut jx = 0.0;
    for i in 0..n {
        let (x0, y0) = raw[i];
        let (x1, y1) = raw[(i + 1) % n];
        let cross = x0 * y1 - x1 * y0;
        jx += (x0 * x0 + x0 * x1 + x1 * x1) * cross;
    }
    jx /= 12.0;
    let steiner = moments.area * r_bar * r_bar + moments.i_zbar;
    assert!(
        (jx - steiner).abs() / steiner.abs() < 1e-12,
        "parallel-axis identity off by {:.3e} relative",
        (jx - steiner).abs() / steiner.abs()
    );
    println!(
        "criterion 7 (revolution segment): PASS  |c_rod - c_rev| = {:.2e}, steiner rel err {:.2e}",
        (c_rod - c_rev).norm(),
        (jx - steiner).abs() / steiner.abs()
    );
}

/// Criterion 8: the cylinder bound is exact, the torus bound equals the
/// analytic area with a vanishing equality defect, and randomized
/// varying-section tubes never exceed the refined mesh area.
#[test]
fn criterion_8_surface_bound() {
    let (r, len) = (0.4, 2.0);
    let line = Ribbon::line(Point3::origin(), Frame::identity(), len).unwrap();
    let cylinder =
        BoundaryTrace::from_fn(&line, 16, 4, 128, TAU, |_, t| (r * t.cos(), r * t.sin()))
            .unwrap();
    let bound = area_lower_bound(&cylinder).unwrap();
    assert!((bound - TAU * r * len).abs() < 1e-10);

    let (big_r, rr) = (1.0, 0.3);
    let circle = Ribbon::circle(Point3::origin(), Vector3::x(), Vector3::y(), big_r).unwrap();
    let torus = BoundaryTrace::from_fn(&circle, 32, 4, 256, TAU, |_, t| {
        (rr * t.cos(), rr * t.sin())
    })
    .unwrap();
    let torus_bound = area_lower_bound(&torus).unwrap();
    let torus_area = 4.0 * PI * PI * big_r * rr;
    assert!(
        (torus_bound - torus_area).abs() / torus_area < 1e-8,
        "torus bound {torus_bound} vs {torus_area}"
    );
    let defect = equality_defect(&torus);
    assert!(defect < 1e-8, "torus equality defect {defect}");

    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut slacks = Vec::new();
    for _ in 0..3 {
        let radius = 1.0 + 0.5 * rng.gen::<f64>();
        let angle = 1.2 + 1.5 * rng.gen::<f64>();
        let a0 = 0.15 + 0.1 * rng.gen::<f64>();
        let b0 = 0.1 + 0.08 * rng.gen::<f64>();
        let wobble = 1.0 + 2.0 * rng.gen::<f64>();
        let spin = 0.5 + rng.gen::<f64>();
        let arc = Ribbon::circular_arc(
            Point3::origin(),
            Vector3::x(),
            Vector3::y(),
            radius,
            angle,
        )
        .unwrap();
        let f = move |s: f64, t: f64| {
            let a = a0 * (1.0 + 0.25 * (wobble * s).sin());
            let b = b0 * (1.0 + 0.2 * (wobble * s).cos());
            let th = spin * s;
            let (u0, v0) = (a * t.cos(), b * t.sin());
            (
                u0 * th.cos() - v0 * th.sin(),
                u0 * th.sin() + v0 * th.cos(),
            )
        };
        let trace = BoundaryTrace::from_fn(&arc, 32, 4, 128, TAU, f).unwrap();
        let bound = area_lower_bound(&trace).unwrap();
        let mesh = swept_mesh_area_refined(&arc, TAU, &f, 1e-6);
        assert!(
            bound <= mesh * (1.0 + 1e-6),
            "bound {bound} exceeds mesh area {mesh}"
        );
        slacks.push((mesh - bound) / mesh);
    }
    println!(
        "criterion 8 (surface bound): PASS  torus defect {defect:.2e}, tube slacks {:?}",
        slacks
            .iter()
            .map(|s| format!("{s:.3e}"))
            .collect::<Vec<_>>()
    );
}

/// Criterion 9: integrating the ellipsoid's cross-section areas along its
/// x-axis centroid line gives 4 pi a b c / 3 to 1e-8 relative.
#[test]
fn criterion_9_full_ellipsoid_volume() {
    let (a, b, c) = (1.0, 0.625, 0.5);
    let body = fig3_ellipsoid();
    let axis = Vector3::x();
    let ribbon = Ribbon::line(
        Point3::new(-a, 0.0, 0.0),
        Frame::new(axis, Vector3::y()).unwrap(),
        2.0 * a,
    )
    .unwrap();
    let volume = centroid_curve_volume(
        &ribbon,
        |s| {
            let p = Point3::new(-a + s, 0.0, 0.0);
            section_area(&body, &axis, &p, 256).unwrap_or(0.0)
        },
        1e-10,
    )
    .unwrap();
    let want = 4.0 * PI * a * b * c / 3.0;
    assert!(
        (volume - want).abs() / want < 1e-8,
        "ellipsoid volume {volume} vs {want}"
    );
    println!("criterion 9 (full ellipsoid volume): PASS  {volume:.12} vs {want:.12}");
}
