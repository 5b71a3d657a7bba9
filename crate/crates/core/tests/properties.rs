//! Property tests for the algebraic invariants that hold for arbitrary
//! inputs, not just the worked examples.

use nalgebra::{Point3, Vector3};
use proptest::prelude::*;

use guldin_core::body::cap_volume_ball;
use guldin_core::frames::{frame_derivative, Curvatures, Frame};
use guldin_core::rod::{profile_moments, ProfileShape};
use guldin_core::volume::ellipse_section;

fn arb_unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter_map("too short to normalize", |(x, y, z)| {
            let v = Vector3::new(x, y, z);
            (v.norm() > 1e-3).then(|| v.normalize())
        })
}

proptest! {
    /// The frame system is skew: each derivative is orthogonal to its own
    /// frame vector, so the flow preserves unit lengths.
    #[test]
    fn frame_derivative_is_tangential(
        t in arb_unit_vector(),
        kn in -10.0f64..10.0,
        kg in -10.0f64..10.0,
        tg in -10.0f64..10.0,
    ) {
        let frame = Frame::from_tangent(t);
        let (dt, dn, db) = frame_derivative(&frame, &Curvatures::new(kn, kg, tg));
        prop_assert!(frame.tangent.dot(&dt).abs() < 1e-12);
        prop_assert!(frame.normal.dot(&dn).abs() < 1e-12);
        prop_assert!(frame.binormal.dot(&db).abs() < 1e-12);
        // d/ds <T,N> = <dT,N> + <T,dN> = 0 as well.
        prop_assert!((dt.dot(&frame.normal) + frame.tangent.dot(&dn)).abs() < 1e-12);
    }

    /// The cap-volume law decreases strictly from the half ball to zero.
    #[test]
    fn cap_volume_is_strictly_decreasing(r1 in 0.01f64..0.98, dr in 0.001f64..0.02) {
        let r2 = (r1 + dr).min(0.99);
        let v1 = cap_volume_ball(r1).unwrap();
        let v2 = cap_volume_ball(r2).unwrap();
        prop_assert!(v2 < v1);
        prop_assert!(v1 < 2.0 * std::f64::consts::PI / 3.0);
        prop_assert!(v2 > 0.0);
    }

    /// Rectangle moments from the polygon vertex formulas agree with the
    /// closed forms for arbitrary placements of the rectangle.
    #[test]
    fn polygon_rectangle_moments_match_closed_form(
        w in 0.1f64..5.0,
        h in 0.1f64..5.0,
        ox in -3.0f64..3.0,
        oy in -3.0f64..3.0,
    ) {
        let poly = profile_moments(ProfileShape::Polygon {
            vertices: vec![
                (ox, oy),
                (ox + w, oy),
                (ox + w, oy + h),
                (ox, oy + h),
            ],
        }).unwrap();
        let rect = profile_moments(ProfileShape::Rectangle { width: w, height: h }).unwrap();
        let scale = (w * h).max(1.0);
        prop_assert!((poly.area - rect.area).abs() < 1e-12 * scale);
        prop_assert!((poly.iu - rect.iu).abs() < 1e-10 * scale * scale);
        prop_assert!((poly.iv - rect.iv).abs() < 1e-10 * scale * scale);
        prop_assert!(poly.iuv.abs() < 1e-10 * scale * scale);
    }

    /// Second-moment matrices of slices stay positive semidefinite under
    /// in-plane rotation, and the slice displacement by t * (kg, kn) leaves
    /// the volume integrand unchanged.
    #[test]
    fn slice_moment_matrix_is_psd_and_displacement_invariant(
        a in 0.05f64..0.8,
        b in 0.05f64..0.8,
        angle in 0.0f64..6.3,
        kn in -2.0f64..2.0,
        kg in -2.0f64..2.0,
        t in -0.1f64..0.1,
    ) {
        let sec = ellipse_section(a, b, 32).rotated(angle);
        prop_assert!(sec.iu >= 0.0);
        prop_assert!(sec.iv >= 0.0);
        prop_assert!(sec.iu * sec.iv - sec.iuv * sec.iuv >= -1e-18);

        let moved = sec.translated(t * kg, t * kn);
        let integrand = |s: &guldin_core::volume::SliceSection| {
            s.area * (1.0 - (s.centroid_uv.0 * kn - s.centroid_uv.1 * kg))
        };
        prop_assert!((integrand(&sec) - integrand(&moved)).abs() < 1e-12);
    }

    /// Ray distances from the center of a ball equal its radius in every
    /// direction.
    #[test]
    fn ball_ray_distance_is_the_radius(dir in arb_unit_vector(), radius in 0.1f64..10.0) {
        let ball = guldin_core::body::ConvexBody::ball(Point3::origin(), radius).unwrap();
        let t = guldin_core::body::ray_boundary_distance(&ball, &Point3::origin(), &dir).unwrap();
        prop_assert!((t - radius).abs() < 1e-10 * radius);
    }
}
