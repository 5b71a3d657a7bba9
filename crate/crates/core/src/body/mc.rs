//! Monte-Carlo volume and centroid estimation by rejection sampling.
//!
//! The sampler draws from one logical counter-based stream (ChaCha8 keyed by
//! the seed), so parallel chunks reproduce the single-threaded sequence
//! bit-for-bit: chunk k starts at word position 6k of the stream, one sample
//! being three f64 draws of two 32-bit words each.

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::ConvexBody;

const CHUNK: u64 = 1 << 16;

/// Axis-aligned sampling box.
#[derive(Debug, Clone, Copy)]
pub struct BoundingBox {
    pub lo: Point3<f64>,
    pub hi: Point3<f64>,
}

impl BoundingBox {
    pub fn new(lo: Point3<f64>, hi: Point3<f64>) -> Result<Self> {
        if !(lo.x < hi.x && lo.y < hi.y && lo.z < hi.z) {
            return Err(Error::InvalidInput(
                "bounding box must have positive extent".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn centered(center: Point3<f64>, half_extents: Vector3<f64>) -> Self {
        Self {
            lo: center - half_extents,
            hi: center + half_extents,
        }
    }

    pub fn volume(&self) -> f64 {
        (self.hi.x - self.lo.x) * (self.hi.y - self.lo.y) * (self.hi.z - self.lo.z)
    }
}

/// Monte-Carlo estimate with its reported uncertainty.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub volume: f64,
    pub std_error: f64,
    pub accepted: u64,
    pub samples: u64,
    /// Sample mean of the accepted points (None when nothing was accepted).
    pub mean_point: Option<Point3<f64>>,
    /// Per-coordinate standard error of the mean point.
    pub point_std_error: Option<Vector3<f64>>,
}

#[derive(Default, Clone, Copy)]
struct ChunkStats {
    accepted: u64,
    sum: Vector3<f64>,
    sumsq: Vector3<f64>,
}

/// Unbiased volume estimate of `predicate` over `bbox` with `n` samples.
/// Deterministic for a fixed seed regardless of thread count.
pub fn monte_carlo_volume<P>(
    predicate: P,
    bbox: &BoundingBox,
    seed: u64,
    n: u64,
) -> Result<McEstimate>
where
    P: Fn(&Point3<f64>) -> bool + Sync,
{
    if n == 0 {
        return Err(Error::InvalidInput(
            "monte carlo needs at least one sample".into(),
        ));
    }
    let chunks = n.div_ceil(CHUNK);
    let stats: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let start = k * CHUNK;
            let count = CHUNK.min(n - start);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_word_pos(start as u128 * 6);
            let mut st = ChunkStats::default();
            let ext = bbox.hi - bbox.lo;
            for _ in 0..count {
                let p = Point3::new(
                    bbox.lo.x + ext.x * rng.gen::<f64>(),
                    bbox.lo.y + ext.y * rng.gen::<f64>(),
                    bbox.lo.z + ext.z * rng.gen::<f64>(),
                );
                if predicate(&p) {
                    st.accepted += 1;
                    st.sum += p.coords;
                    st.sumsq += p.coords.component_mul(&p.coords);
                }
            }
            st
        })
        .collect();

    // Fixed summation order over chunk indices keeps the result reproducible.
    let mut total = ChunkStats::default();
    for st in stats {
        total.accepted += st.accepted;
        total.sum += st.sum;
        total.sumsq += st.sumsq;
    }

    let box_vol = bbox.volume();
    let p_hat = total.accepted as f64 / n as f64;
    let volume = box_vol * p_hat;
    let std_error = box_vol * (p_hat * (1.0 - p_hat) / n as f64).sqrt();
    let (mean_point, point_std_error) = if total.accepted > 0 {
        let acc = total.accepted as f64;
        let mean = total.sum / acc;
        let var = (total.sumsq / acc - mean.component_mul(&mean)).map(|v| v.max(0.0));
        (
            Some(Point3::from(mean)),
            Some((var / acc).map(f64::sqrt)),
        )
    } else {
        (None, None)
    };
    Ok(McEstimate {
        volume,
        std_error,
        accepted: total.accepted,
        samples: n,
        mean_point,
        point_std_error,
    })
}

/// Convenience wrapper sampling the body's own bounding box.
pub fn monte_carlo_volume_of_body(body: &ConvexBody, seed: u64, n: u64) -> Result<McEstimate> {
    let bbox = body.bounding_box();
    monte_carlo_volume(|p| body.contains(p), &bbox, seed, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn unit_ball_volume_within_four_sigma() {
        let ball = ConvexBody::unit_ball();
        let est = monte_carlo_volume_of_body(&ball, 42, 1_000_000).unwrap();
        let want = 4.0 * PI / 3.0;
        assert!(
            (est.volume - want).abs() < 4.0 * est.std_error,
            "estimate {} vs {} (se {})",
            est.volume,
            want,
            est.std_error
        );
    }

    #[test]
    fn cube_predicate_is_exact_with_zero_variance() {
        let bbox = BoundingBox::new(Point3::new(0.0, 0.0, 0.0), Point3::new(2.0, 1.0, 0.5)).unwrap();
        let est = monte_carlo_volume(|_| true, &bbox, 1, 100_000).unwrap();
        assert_eq!(est.volume, bbox.volume());
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.accepted, est.samples);
    }

    #[test]
    fn ellipsoid_volume_within_four_sigma() {
        let body = ConvexBody::ellipsoid(Point3::origin(), [1.0, 0.625, 0.5]).unwrap();
        let est = monte_carlo_volume_of_body(&body, 7, 1_000_000).unwrap();
        let want = 4.0 * PI * 0.3125 / 3.0;
        assert!((est.volume - want).abs() < 4.0 * est.std_error);
    }

    #[test]
    fn zero_samples_is_an_error() {
        let ball = ConvexBody::unit_ball();
        assert!(monte_carlo_volume_of_body(&ball, 0, 0).is_err());
    }

    #[test]
    fn chunked_stream_matches_serial_stream() {
        // The chunked parallel run must reproduce one linear pass over the
        // same ChaCha stream.
        let ball = ConvexBody::unit_ball();
        let bbox = ball.bounding_box();
        let n: u64 = 200_000; // forces several chunks
        let est = monte_carlo_volume(|p| ball.contains(p), &bbox, 9, n).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ext = bbox.hi - bbox.lo;
        let mut accepted = 0u64;
        let mut sum = Vector3::zeros();
        for _ in 0..n {
            let p = Point3::new(
                bbox.lo.x + ext.x * rng.gen::<f64>(),
                bbox.lo.y + ext.y * rng.gen::<f64>(),
                bbox.lo.z + ext.z * rng.gen::<f64>(),
            );
            if ball.contains(&p) {
                accepted += 1;
                sum += p.coords;
            }
        }
        assert_eq!(est.accepted, accepted);
        let mean = sum / accepted as f64;
        let got = est.mean_point.unwrap();
        assert_relative_eq!(got.x, mean.x, epsilon = 1e-12);
        assert_relative_eq!(got.y, mean.y, epsilon = 1e-12);
        assert_relative_eq!(got.z, mean.z, epsilon = 1e-12);
    }

    #[test]
    fn repeated_runs_are_bitwise_identical() {
        let ball = ConvexBody::unit_ball();
        let a = monte_carlo_volume_of_body(&ball, 1234, 300_000).unwrap();
        let b = monte_carlo_volume_of_body(&ball, 1234, 300_000).unwrap();
        assert_eq!(a.volume.to_bits(), b.volume.to_bits());
        assert_eq!(a.accepted, b.accepted);
    }
}
