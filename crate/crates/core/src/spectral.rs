//! Spectral differentiation of uniformly sampled periodic data.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Derivative of a periodic sequence sampled at n uniform points over one
/// period. Differentiation happens in Fourier space, so smooth data keeps
/// spectral accuracy; the Nyquist mode is dropped as usual for odd operators.
pub fn periodic_derivative(values: &[f64], period: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 2, "need at least two samples");
    assert!(period > 0.0, "period must be positive");

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft.process(&mut buf);

    let base = 2.0 * std::f64::consts::PI / period;
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = if 2 * k < n {
            k as f64
        } else if 2 * k == n {
            0.0 // Nyquist
        } else {
            k as f64 - n as f64
        };
        *c *= Complex::new(0.0, freq * base);
    }
    ifft.process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn derivative_of_sin_is_cos() {
        let n = 64;
        let period = 2.0 * std::f64::consts::PI;
        let xs: Vec<f64> = (0..n).map(|i| period * i as f64 / n as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| x.sin()).collect();
        let d = periodic_derivative(&vals, period);
        for (x, dv) in xs.iter().zip(d) {
            assert_abs_diff_eq!(dv, x.cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let d = periodic_derivative(&[3.5; 32], 1.0);
        for v in d {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn scales_with_period() {
        // f(t) = cos(2 pi t / T) has derivative -2 pi / T sin(2 pi t / T).
        let n = 128;
        let period = 3.0;
        let xs: Vec<f64> = (0..n).map(|i| period * i as f64 / n as f64).collect();
        let w = 2.0 * std::f64::consts::PI / period;
        let vals: Vec<f64> = xs.iter().map(|&x| (w * x).cos()).collect();
        let d = periodic_derivative(&vals, period);
        for (x, dv) in xs.iter().zip(d) {
            assert_abs_diff_eq!(dv, -w * (w * x).sin(), epsilon = 1e-11);
        }
    }
}
