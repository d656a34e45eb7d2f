//! Discrete Fourier machinery shared by the boundary solver, the map grids
//! and the Sobolev seminorms: thin wrappers over rustfft plus the circle
//! conjugation operator and monotone interpolation of correspondence lifts.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward DFT, unnormalized: `X_k = sum_j x_j e^{-2pi i jk/N}`.
pub fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

/// Inverse DFT, unnormalized: `x_j = sum_k X_k e^{+2pi i jk/N}`.
pub fn idft(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    FftPlanner::new()
        .plan_fft_inverse(buf.len())
        .process(&mut buf);
    buf
}

/// Fourier coefficients of uniformly sampled data: `a_k = (1/N) sum_j x_j e^{-2pi i jk/N}`.
/// Index `k` is in FFT order (`k` for `k < N/2`, `k - N` for `k >= N/2`).
pub fn fourier_coefficients(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len() as f64;
    dft(samples).into_iter().map(|c| c / n).collect()
}

/// Signed frequency of FFT bin `k` in a length-`n` transform.
pub fn fft_frequency(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Circle conjugation operator on uniformly sampled real data: multiplies
/// mode `k` by `-i sign(k)` and drops the mean and the Nyquist mode. The
/// conjugate of `cos` is `sin`; applied to `log R` it yields the argument
/// correction of the boundary correspondence.
pub fn conjugate_function(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = fft_frequency(k, n);
        let mult = if freq == 0 || (n % 2 == 0 && k == n / 2) {
            Complex64::new(0.0, 0.0)
        } else if freq > 0 {
            Complex64::new(0.0, -1.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        *c *= mult;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Spectral derivative d/dt of uniformly sampled periodic real data on [0, 2pi).
pub fn spectral_derivative(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = fft_frequency(k, n);
        let mult = if n % 2 == 0 && k == n / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, freq as f64)
        };
        *c *= mult;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Unwrap a sequence of angles into a continuous lift (consecutive jumps
/// folded into (-pi, pi]).
pub fn unwrap_angles(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let mut offset = 0.0;
    for (i, &a) in angles.iter().enumerate() {
        if i > 0 {
            let prev = out[i - 1] - offset;
            let mut d = a - prev;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
                offset -= 2.0 * std::f64::consts::PI;
            }
            while d <= -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
                offset += 2.0 * std::f64::consts::PI;
            }
        }
        out.push(a + offset);
    }
    out
}

/// Wrap an angle difference into (-pi, pi].
pub fn wrap_to_pi(mut a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    a %= two_pi;
    if a > std::f64::consts::PI {
        a -= two_pi;
    } else if a <= -std::f64::consts::PI {
        a += two_pi;
    }
    a
}

/// Monotone cubic (Fritsch-Carlson) interpolant of strictly increasing data.
/// Interpolating a monotone correspondence lift with it preserves
/// monotonicity, which a plain cubic spline does not guarantee.
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(x.len() >= 2);
        let n = x.len();
        let mut delta = vec![0.0; n - 1];
        for i in 0..n - 1 {
            delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        }
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                // harmonic mean as in Fritsch-Butland keeps the limiter simple
                let w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                let w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
                m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        // clamp endpoint slopes
        for (i, d) in delta.iter().enumerate() {
            for j in [i, i + 1] {
                if d.abs() < f64::EPSILON {
                    m[j] = 0.0;
                } else if (m[j] / d).abs() > 3.0 {
                    m[j] = 3.0 * d;
                }
            }
        }
        MonotoneCubic { x, y, slope: m }
    }

    pub fn eval(&self, xq: f64) -> f64 {
        let n = self.x.len();
        let i = match self
            .x
            .binary_search_by(|v| v.partial_cmp(&xq).expect("non-finite abscissa"))
        {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_of_cos_is_sin() {
        let n = 64;
        let samples: Vec<f64> = (0..n)
            .map(|j| (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        let conj = conjugate_function(&samples);
        for (j, c) in conj.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            assert!((c - t.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn spectral_derivative_of_sin() {
        let n = 128;
        let samples: Vec<f64> = (0..n)
            .map(|j| (2.0 * std::f64::consts::PI * j as f64 / n as f64).sin())
            .collect();
        let d = spectral_derivative(&samples);
        for (j, v) in d.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            assert!((v - t.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_cubic_preserves_monotone_data() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.4).collect();
        let y: Vec<f64> = x.iter().map(|&v| v + 0.3 * v.sin()).collect();
        let interp = MonotoneCubic::new(x.clone(), y);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..400 {
            let v = interp.eval(0.019 * k as f64);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn unwrap_handles_wraparound() {
        let angles: Vec<f64> = (0..100)
            .map(|i| wrap_to_pi(0.2 * i as f64))
            .collect();
        let lift = unwrap_angles(&angles);
        for (i, v) in lift.iter().enumerate() {
            assert!((v - 0.2 * i as f64).abs() < 1e-12);
        }
    }
}
