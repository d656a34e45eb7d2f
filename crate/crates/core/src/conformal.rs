//! Interior and exterior conformal maps of a Jordan curve.
//!
//! Maps are held as Taylor coefficients at 0 together with the boundary
//! correspondence produced by the solve. The interior solver is a
//! Theodorsen-type fixed-point iteration on the boundary correspondence,
//! using the circle conjugation operator realized by the FFT; it is
//! restricted to curves star-like about the chosen center. Exterior maps are
//! never represented directly: `g(z) = 1/g_tilde(1/z)` where `g_tilde` is the
//! interior map of the inverted curve.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ParametricCurve;
use crate::spectral;

/// Largest radius at which the truncated Taylor series is evaluated through
/// the public interface.
pub const EVAL_RADIUS: f64 = 1.0 - 1e-6;

/// A function on the unit circle held as uniform samples together with its
/// exact discrete Fourier transform (coefficients in FFT index order).
#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    pub samples: Vec<Complex64>,
    pub fourier: Vec<Complex64>,
}

impl BoundaryFunction {
    pub fn from_samples(samples: Vec<Complex64>) -> Self {
        let fourier = spectral::fourier_coefficients(&samples);
        BoundaryFunction { samples, fourier }
    }

    pub fn from_real_samples(samples: Vec<f64>) -> Self {
        Self::from_samples(samples.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Coefficient of `e^{ik t}` for signed `k`.
    pub fn mode(&self, k: i64) -> Complex64 {
        let n = self.fourier.len() as i64;
        let idx = k.rem_euclid(n) as usize;
        self.fourier[idx]
    }
}

/// Which domain the disk map uniformizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapRole {
    /// `f : D -> Omega`, the bounded component.
    InteriorOfCurve,
    /// `g_tilde : D -> i(C \ closure(Omega))`, the inverted complement.
    InteriorOfInvertedComplement,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Normalization {
    /// Value of the map at 0 (the chosen center).
    pub center: Complex64,
    /// Whether the derivative at 0 is normalized real positive.
    pub derivative_real_positive: bool,
}

/// A univalent map of the unit disk held as Taylor coefficients `a_0..a_M`
/// plus the boundary correspondence of the solve that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyticDiskMap {
    taylor: Vec<Complex64>,
    /// Curve-parameter lift `s(t_k)` at `t_k = 2 pi k / N`; strictly
    /// monotone, direction matching the curve orientation.
    #[serde(skip)]
    boundary_correspondence: Option<Vec<f64>>,
    pub residual: f64,
    pub tail_bound: f64,
    pub normalization: Normalization,
    pub role: MapRole,
    #[serde(skip)]
    pub curve_id: Option<u64>,
}

impl AnalyticDiskMap {
    /// Build a map directly from Taylor coefficients. This is the primary
    /// test path: identities are exercised on exact polynomial maps without
    /// running the boundary solver. Checks that `a_1 != 0` and that the
    /// derivative has no zero in the closed disk (argument-principle winding
    /// plus a boundary minimum scan).
    pub fn from_taylor(taylor: Vec<Complex64>) -> Result<Self> {
        if taylor.len() < 2 {
            return Err(Error::InvalidParameter {
                kind: "taylor map",
                msg: "need at least a linear coefficient".into(),
            });
        }
        let a1 = taylor[1].norm();
        if a1 < 1e-12 {
            return Err(Error::DegenerateMap { value: a1 });
        }
        check_derivative_nonvanishing(&taylor)?;
        let center = taylor[0];
        let real_positive = taylor[1].im.abs() <= 1e-12 * a1 && taylor[1].re > 0.0;
        Ok(AnalyticDiskMap {
            taylor,
            boundary_correspondence: None,
            residual: 0.0,
            tail_bound: 0.0,
            normalization: Normalization {
                center,
                derivative_real_positive: real_positive,
            },
            role: MapRole::InteriorOfCurve,
            curve_id: None,
        })
    }

    /// Entered map tied to the power-series curve it parametrizes: the
    /// boundary correspondence is the identity.
    pub fn from_taylor_for_curve(
        taylor: Vec<Complex64>,
        curve: &ParametricCurve,
        n: usize,
    ) -> Result<Self> {
        let mut map = Self::from_taylor(taylor)?;
        map.curve_id = Some(curve.id);
        map.boundary_correspondence =
            Some((0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect());
        let mut residual: f64 = 0.0;
        for k in 0..n {
            let t = 2.0 * PI * k as f64 / n as f64;
            let p = horner(&map.taylor, Complex64::from_polar(1.0, t));
            residual = residual.max((p - curve.eval(t)).norm());
        }
        map.residual = residual;
        Ok(map)
    }

    pub fn with_role(mut self, role: MapRole) -> Self {
        self.role = role;
        self
    }

    pub fn taylor(&self) -> &[Complex64] {
        &self.taylor
    }

    pub fn degree(&self) -> usize {
        self.taylor.len() - 1
    }

    pub fn value_at_zero(&self) -> Complex64 {
        self.taylor[0]
    }

    pub fn derivative_at_zero(&self) -> Complex64 {
        self.taylor[1]
    }

    pub fn boundary_correspondence(&self) -> Option<&[f64]> {
        self.boundary_correspondence.as_deref()
    }

    /// Evaluate `(f, f', f'')` from the truncated series; the truncation
    /// error bound is `self.tail_bound`. Errors outside `|z| <= EVAL_RADIUS`.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
        let abs = z.norm();
        if abs > EVAL_RADIUS {
            return Err(Error::OutOfRadius { abs, r_max: EVAL_RADIUS });
        }
        Ok(self.eval_unchecked(z))
    }

    /// Horner evaluation of `(f, f', f'')` with derivative recurrences, no
    /// radius gate (internal paths evaluate on the unit circle itself).
    pub fn eval_unchecked(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let mut f = Complex64::new(0.0, 0.0);
        let mut fp = Complex64::new(0.0, 0.0);
        let mut fpp = Complex64::new(0.0, 0.0);
        for c in self.taylor.iter().rev() {
            fpp = fpp * z + 2.0 * fp;
            fp = fp * z + f;
            f = f * z + c;
        }
        (f, fp, fpp)
    }

    /// `f(z)/z` evaluated stably (requires `a_0 = 0`; the series is shifted,
    /// no division at small `|z|`).
    pub fn value_over_z(&self, z: Complex64) -> Result<Complex64> {
        if self.taylor[0].norm() > 1e-10 {
            return Err(Error::NonzeroConstantTerm { a0: self.taylor[0] });
        }
        Ok(horner(&self.taylor[1..], z))
    }

    /// `f'(z)/f(z) - 1/z = h1(z) / (f(z)/z)` with `h1 = sum_{k>=2} (k-1) a_k z^{k-2}`,
    /// an exact rational rearrangement of the removable singularity at 0
    /// (requires `a_0 = 0`).
    pub fn log_deriv_minus_pole(&self, z: Complex64) -> Result<Complex64> {
        let f0 = self.value_over_z(z)?;
        let h1: Vec<Complex64> = self
            .taylor
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, c)| c * (k as f64 - 1.0))
            .collect();
        Ok(horner(&h1, z) / f0)
    }

    /// Shrunk approximation family member: coefficients `a_k (1-eps)^{k-1}`.
    /// Requires `a_0 = 0`.
    pub fn shrink(&self, eps: f64) -> Result<AnalyticDiskMap> {
        if !(0.0 < eps && eps < 1.0) {
            return Err(Error::InvalidParameter {
                kind: "shrink",
                msg: format!("epsilon = {eps} is outside (0, 1)"),
            });
        }
        if self.taylor[0].norm() > 1e-12 {
            return Err(Error::NonzeroConstantTerm { a0: self.taylor[0] });
        }
        let taylor: Vec<Complex64> = self
            .taylor
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k == 0 {
                    *c
                } else {
                    c * (1.0 - eps).powi(k as i32 - 1)
                }
            })
            .collect();
        Ok(AnalyticDiskMap {
            taylor,
            boundary_correspondence: None,
            residual: 0.0,
            tail_bound: self.tail_bound,
            normalization: self.normalization,
            role: self.role,
            curve_id: None,
        })
    }

    /// Map exchange format (JSON); identical schema for interior and
    /// inverted-exterior maps.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Values of `(f, f', f'')` on the circle of radius `r` at `n_theta`
    /// uniform angles, via one inverse FFT per derivative order when the
    /// degree allows it.
    pub fn eval_on_circle(&self, r: f64, n_theta: usize) -> CircleValues {
        let m = self.taylor.len();
        if m > n_theta {
            // degree exceeds the angular bandwidth: fall back to Horner
            let mut f = Vec::with_capacity(n_theta);
            let mut fp = Vec::with_capacity(n_theta);
            let mut fpp = Vec::with_capacity(n_theta);
            for j in 0..n_theta {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / n_theta as f64);
                let (a, b, c) = self.eval_unchecked(z);
                f.push(a);
                fp.push(b);
                fpp.push(c);
            }
            return CircleValues { f, fp, fpp };
        }
        let mut planner = FftPlanner::new();
        let plan = planner.plan_fft_inverse(n_theta);
        let synth = |coeffs: Vec<Complex64>| -> Vec<Complex64> {
            let mut buf = coeffs;
            buf.resize(n_theta, Complex64::new(0.0, 0.0));
            plan.process(&mut buf);
            buf
        };
        let mut b0 = Vec::with_capacity(m);
        let mut b1 = Vec::with_capacity(m);
        let mut b2 = Vec::with_capacity(m);
        let mut rk = 1.0;
        for (k, a) in self.taylor.iter().enumerate() {
            b0.push(a * rk);
            if k + 1 < m {
                b1.push(self.taylor[k + 1] * (k as f64 + 1.0) * rk);
            }
            if k + 2 < m {
                b2.push(self.taylor[k + 2] * ((k + 1) * (k + 2)) as f64 * rk);
            }
            rk *= r;
        }
        CircleValues {
            f: synth(b0),
            fp: synth(b1),
            fpp: synth(b2),
        }
    }
}

/// `(f, f', f'')` on one circle of a polar grid.
pub struct CircleValues {
    pub f: Vec<Complex64>,
    pub fp: Vec<Complex64>,
    pub fpp: Vec<Complex64>,
}

/// `(f, f', f'')` on a full polar grid, radius-major, matching the
/// quadrature node order.
pub struct MapGrid {
    pub f: Vec<Complex64>,
    pub fp: Vec<Complex64>,
    pub fpp: Vec<Complex64>,
}

/// Values of an arbitrary Taylor polynomial on a polar grid (radius-major),
/// one inverse FFT per radius when the degree allows it.
pub fn poly_grid(coeffs: &[Complex64], radii: &[f64], n_theta: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(radii.len() * n_theta);
    if coeffs.len() > n_theta {
        for &r in radii {
            for j in 0..n_theta {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / n_theta as f64);
                out.push(horner(coeffs, z));
            }
        }
        return out;
    }
    let mut planner = FftPlanner::new();
    let plan = planner.plan_fft_inverse(n_theta);
    for &r in radii {
        let mut buf = Vec::with_capacity(n_theta);
        let mut rk = 1.0;
        for c in coeffs {
            buf.push(c * rk);
            rk *= r;
        }
        buf.resize(n_theta, Complex64::new(0.0, 0.0));
        plan.process(&mut buf);
        out.extend_from_slice(&buf);
    }
    out
}

pub fn map_grid(map: &AnalyticDiskMap, radii: &[f64], n_theta: usize) -> MapGrid {
    let total = radii.len() * n_theta;
    let mut grid = MapGrid {
        f: Vec::with_capacity(total),
        fp: Vec::with_capacity(total),
        fpp: Vec::with_capacity(total),
    };
    for &r in radii {
        let ring = map.eval_on_circle(r, n_theta);
        grid.f.extend_from_slice(&ring.f);
        grid.fp.extend_from_slice(&ring.fp);
        grid.fpp.extend_from_slice(&ring.fpp);
    }
    grid
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Argument-principle check that `f'` has no zero in the closed disk: the
/// winding of `f'` along `|z| = 1` counts interior zeros, and a boundary
/// minimum scan rejects zeros on the circle itself.
fn check_derivative_nonvanishing(taylor: &[Complex64]) -> Result<()> {
    let n = 4096.max(8 * taylor.len()).next_power_of_two();
    let mut args = Vec::with_capacity(n);
    let mut min_abs = f64::INFINITY;
    let deriv: Vec<Complex64> = taylor
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    for j in 0..n {
        let z = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        let d = horner(&deriv, z);
        min_abs = min_abs.min(d.norm());
        args.push(d.arg());
    }
    if min_abs < 1e-9 {
        return Err(Error::NonUnivalent { zeros: 1 });
    }
    let lift = spectral::unwrap_angles(&args);
    let winding = ((lift[n - 1] - lift[0] + spectral::wrap_to_pi(args[0] - args[n - 1]))
        / (2.0 * PI))
        .round() as i64;
    if winding != 0 {
        return Err(Error::NonUnivalent { zeros: winding.unsigned_abs() as usize });
    }
    Ok(())
}

/// Solver parameters for the boundary-correspondence iteration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Number of boundary nodes (power of two).
    pub n: usize,
    /// Target boundary residual.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n: 1024,
            tol: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Radial oracle of a curve star-like about `center`: for a polar angle
/// `phi` it returns the curve parameter and point with `arg(gamma - center) = phi`,
/// found by a Newton iteration seeded from the sample table. No
/// interpolation enters: the curve's own closed-form parametrization is
/// evaluated, so the radius is exact to rounding.
struct PolarOracle<'a> {
    curve: &'a ParametricCurve,
    center: Complex64,
    t_step: f64,
    ang_lift: Vec<f64>,
    increasing: bool,
}

impl<'a> PolarOracle<'a> {
    fn new(curve: &'a ParametricCurve, center: Complex64) -> Self {
        let angles: Vec<f64> = curve.samples.iter().map(|z| (z - center).arg()).collect();
        let mut ang_lift = spectral::unwrap_angles(&angles);
        let closing = ang_lift[0]
            + if ang_lift[ang_lift.len() - 1] > ang_lift[0] {
                2.0 * PI
            } else {
                -2.0 * PI
            };
        ang_lift.push(closing);
        let increasing = closing > ang_lift[0];
        PolarOracle {
            curve,
            center,
            t_step: 2.0 * PI / curve.samples.len() as f64,
            ang_lift,
            increasing,
        }
    }

    fn solve(&self, phi: f64) -> (f64, Complex64) {
        let base = self.ang_lift[0];
        let span = if self.increasing { 2.0 * PI } else { -2.0 * PI };
        let k = ((phi - base) / span).floor();
        let phi_red = phi - k * span;
        // locate the bracketing sample
        let idx = if self.increasing {
            self.ang_lift.partition_point(|&a| a <= phi_red)
        } else {
            self.ang_lift.partition_point(|&a| a >= phi_red)
        };
        let idx = idx.clamp(1, self.ang_lift.len() - 1);
        let mut t = (idx as f64 - 0.5) * self.t_step;
        let mut point = self.curve.eval(t);
        for _ in 0..60 {
            let rel = point - self.center;
            let h = spectral::wrap_to_pi(rel.arg() - phi_red);
            if h.abs() < 1e-14 {
                break;
            }
            let dh = (self.curve.eval_derivative(t) / rel).im;
            t -= h / dh;
            point = self.curve.eval(t);
        }
        (t, point)
    }
}

/// Compute the interior conformal map `f : D -> Omega` with `f(0) = center`
/// and `f'(0) > 0` by the Theodorsen fixed-point iteration
/// `phi_{k+1}(t) = t + K[log R(phi_k)](t)`, where `K` is the circle
/// conjugation operator and `R` the radial function about `center`. Taylor
/// coefficients come from the discrete Fourier transform of the converged
/// boundary values, truncated at `N/2 - 1`.
pub fn solve_interior_map(
    curve: &ParametricCurve,
    center: Complex64,
    n: usize,
    tol: f64,
) -> Result<AnalyticDiskMap> {
    solve_interior_with(
        curve,
        center,
        &SolverConfig {
            n,
            tol,
            ..SolverConfig::default()
        },
    )
}

pub fn solve_interior_with(
    curve: &ParametricCurve,
    center: Complex64,
    cfg: &SolverConfig,
) -> Result<AnalyticDiskMap> {
    if !curve.closed {
        return Err(Error::NotClosed);
    }
    if !cfg.n.is_power_of_two() {
        return Err(Error::InvalidParameter {
            kind: "solver",
            msg: format!("node count {} is not a power of two", cfg.n),
        });
    }
    if !curve.contains(center) {
        return Err(Error::CenterOutside { center });
    }
    if !curve.is_star_like_about(center) {
        return Err(Error::NotStarLike { center });
    }
    let oracle = PolarOracle::new(curve, center);
    let n = cfg.n;
    let grid: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
    let mut phi = grid.clone();
    let stop = (cfg.tol * 1e-2).max(5e-15);
    let mut delta = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..cfg.max_iterations {
        iterations = it + 1;
        let log_r: Vec<f64> = phi
            .iter()
            .map(|&p| (oracle.solve(p).1 - center).norm().ln())
            .collect();
        let conj = spectral::conjugate_function(&log_r);
        delta = 0.0;
        for j in 0..n {
            let new = grid[j] + conj[j];
            delta = delta.max((new - phi[j]).abs());
            phi[j] = new;
        }
        if delta < stop {
            converged = true;
            break;
        }
    }
    // final correspondence and boundary values
    let mut params = Vec::with_capacity(n);
    let mut boundary = Vec::with_capacity(n);
    for &p in &phi {
        let (t, point) = oracle.solve(p);
        params.push(t);
        boundary.push(point - center);
    }
    let coeffs = spectral::fourier_coefficients(&boundary);
    let m = n / 2;
    let mut taylor: Vec<Complex64> = coeffs[..m].to_vec();
    let max_mag = taylor.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tail_bound = geometric_tail(&taylor) + 4.0 * f64::EPSILON * n as f64 * max_mag;
    taylor[0] += center;

    // residual of the truncated representation against the curve
    let probe = AnalyticDiskMap {
        taylor: taylor.clone(),
        boundary_correspondence: None,
        residual: 0.0,
        tail_bound,
        normalization: Normalization {
            center,
            derivative_real_positive: true,
        },
        role: MapRole::InteriorOfCurve,
        curve_id: None,
    };
    let ring = probe.eval_on_circle(1.0, n);
    let mut residual: f64 = 0.0;
    for j in 0..n {
        residual = residual.max((ring.f[j] - (boundary[j] + center)).norm());
    }
    if !converged || residual > cfg.tol {
        return Err(Error::NoConvergence {
            iterations,
            delta,
            residual,
            tol: cfg.tol,
        });
    }
    let a1 = taylor[1];
    if a1.norm() < 1e-12 {
        return Err(Error::DegenerateMap { value: a1.norm() });
    }

    // strictly monotone correspondence lift
    let wrapped: Vec<f64> = params.iter().map(|&t| spectral::wrap_to_pi(t)).collect();
    let lift = spectral::unwrap_angles(&wrapped);
    let dir = (lift[n - 1] - lift[0]).signum();
    if lift.windows(2).any(|w| (w[1] - w[0]) * dir <= 0.0) {
        return Err(Error::NotStarLike { center });
    }

    Ok(AnalyticDiskMap {
        taylor,
        boundary_correspondence: Some(lift),
        residual,
        tail_bound,
        normalization: Normalization {
            center,
            derivative_real_positive: a1.im.abs() <= 1e-9 * a1.norm().max(1e-30) && a1.re > 0.0,
        },
        role: MapRole::InteriorOfCurve,
        curve_id: Some(curve.id),
    })
}

/// Geometric extrapolation of the coefficient tail from the last decade of
/// stored magnitudes; conservative when no clear decay is visible.
fn geometric_tail(taylor: &[Complex64]) -> f64 {
    let len = taylor.len();
    let k = (len / 10).max(4).min(len - 1);
    let mags: Vec<f64> = taylor[len - k..].iter().map(|c| c.norm()).collect();
    let max_mag = mags.iter().cloned().fold(0.0, f64::max);
    if max_mag == 0.0 {
        return 0.0;
    }
    let first = mags[0];
    let last = mags[k - 1];
    if last > 0.0 && first > last {
        let q = (last / first).powf(1.0 / (k as f64 - 1.0));
        if q < 0.99 {
            return last * q / (1.0 - q);
        }
    }
    max_mag * len as f64
}

/// Exterior map via inversion: solves the interior map of `t -> 1/gamma(t)`
/// about 0. The represented exterior map is `g(z) = 1/g_tilde(1/z)` with
/// `|g'(infinity)| = 1/g_tilde'(0)`.
pub fn solve_exterior_via_inversion(
    curve: &ParametricCurve,
    cfg: &SolverConfig,
) -> Result<AnalyticDiskMap> {
    if !curve.contains(Complex64::new(0.0, 0.0)) {
        return Err(Error::CenterOutside {
            center: Complex64::new(0.0, 0.0),
        });
    }
    let inverted = curve.inverted()?;
    let mut map = solve_interior_with(&inverted, Complex64::new(0.0, 0.0), cfg)?;
    map.role = MapRole::InteriorOfInvertedComplement;
    map.curve_id = Some(curve.id);
    Ok(map)
}

/// View of the exterior map `g(z) = 1/g_tilde(1/z)` on `|z| > 1`. Only
/// ratios that stay numerically stable under the inversion are exposed; the
/// direct exterior map is never represented.
pub struct ExteriorMap<'a> {
    inner: &'a AnalyticDiskMap,
}

/// Pointwise exterior quantities at `z`, `|z| > 1`.
pub struct ExteriorRatios {
    pub value: Complex64,
    /// `g'(z)/g(z)`
    pub log_deriv: Complex64,
    /// `g''(z)/g'(z)`
    pub pre_schwarzian: Complex64,
    /// `|g'(z)|^2 / (1 + |g(z)|^2)^2`
    pub spherical_density: f64,
}

impl<'a> ExteriorMap<'a> {
    pub fn new(inverted_interior: &'a AnalyticDiskMap) -> Result<Self> {
        let a0 = inverted_interior.value_at_zero();
        if a0.norm() > 1e-10 {
            return Err(Error::NonzeroConstantTerm { a0 });
        }
        Ok(ExteriorMap {
            inner: inverted_interior,
        })
    }

    pub fn derivative_at_infinity_abs(&self) -> f64 {
        1.0 / self.inner.derivative_at_zero().norm()
    }

    /// Evaluate the stable ratio forms at `z` with `|z| > 1` by pulling back
    /// to `w = 1/z`:
    /// `g'/g = w^2 G'/G`, `g''/g' = -2w - w^2 G''/G' + 2 w^2 G'/G`,
    /// `|g'|^2/(1+|g|^2)^2 = |w|^4 |G'|^2/(1+|G|^2)^2`.
    pub fn ratios(&self, z: Complex64) -> Result<ExteriorRatios> {
        let abs = z.norm();
        if abs <= 1.0 {
            return Err(Error::OutOfRadius {
                abs,
                r_max: f64::INFINITY,
            });
        }
        let w = 1.0 / z;
        let (g, gp, gpp) = self.inner.eval_unchecked(w);
        let over_w = self.inner.value_over_z(w)?; // G/w, stable at small |w|
        let log_deriv = w * gp / over_w; // w^2 G'/G
        let pre_schwarzian = -2.0 * w - w * w * gpp / gp + 2.0 * log_deriv;
        let denom = 1.0 + g.norm_sqr();
        let spherical_density = w.norm_sqr().powi(2) * gp.norm_sqr() / (denom * denom);
        Ok(ExteriorRatios {
            value: 1.0 / g,
            log_deriv,
            pre_schwarzian,
            spherical_density,
        })
    }
}

/// Conformal welding of a curve: the circle homeomorphism `w = g^{-1} o f`
/// restricted to the unit circle, assembled from the two boundary
/// correspondences. The lift is strictly increasing for every successful
/// solve.
#[derive(Debug, Clone)]
pub struct Welding {
    /// Samples of `w(e^{i t_k})`.
    pub map: BoundaryFunction,
    /// Strictly increasing lift `tau(t_k)` with `w(e^{it}) = e^{i tau(t)}`.
    pub lift: Vec<f64>,
    /// Samples of `log w'(t)` (real).
    pub log_derivative: BoundaryFunction,
}

pub fn welding(f: &AnalyticDiskMap, g_tilde: &AnalyticDiskMap) -> Result<Welding> {
    if let (Some(a), Some(b)) = (f.curve_id, g_tilde.curve_id) {
        if a != b {
            return Err(Error::MismatchedCurves { first: a, second: b });
        }
    }
    let theta_f = f
        .boundary_correspondence()
        .ok_or(Error::MissingCorrespondence)?;
    let sigma = g_tilde
        .boundary_correspondence()
        .ok_or(Error::MissingCorrespondence)?;
    if theta_f.len() != sigma.len() {
        return Err(Error::InvalidParameter {
            kind: "welding",
            msg: "correspondence lengths differ".into(),
        });
    }
    let n = theta_f.len();
    // theta_f increases with t; sigma decreases (the inverted curve flips
    // orientation), so C = -sigma increases. The welding lift is
    // tau(t) = -C^{-1}(-theta_f(t)).
    for w in theta_f.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::NonMonotoneWelding { index: 0 });
        }
    }
    let c_vals: Vec<f64> = sigma.iter().map(|&s| -s).collect();
    for w in c_vals.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::NonMonotoneWelding { index: 1 });
        }
    }
    // periodic extension of the inverse relation (C, tau), three periods
    let mut xs = Vec::with_capacity(3 * n + 1);
    let mut ys = Vec::with_capacity(3 * n + 1);
    for shift in [-1.0, 0.0, 1.0] {
        for (j, &c) in c_vals.iter().enumerate() {
            xs.push(c + 2.0 * PI * shift);
            ys.push(2.0 * PI * j as f64 / n as f64 + 2.0 * PI * shift);
        }
    }
    xs.push(c_vals[0] + 4.0 * PI);
    ys.push(4.0 * PI);
    let inverse = spectral::MonotoneCubic::new(xs, ys);

    let mut lift: Vec<f64> = theta_f
        .iter()
        .map(|&x| -inverse.eval(-x))
        .collect();
    let base = (lift[0] / (2.0 * PI)).floor() * 2.0 * PI;
    for v in &mut lift {
        *v -= base;
    }
    for (j, w) in lift.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::NonMonotoneWelding { index: j + 1 });
        }
    }
    let samples: Vec<Complex64> = lift.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let periodic: Vec<f64> = lift
        .iter()
        .enumerate()
        .map(|(j, &t)| t - 2.0 * PI * j as f64 / n as f64)
        .collect();
    let dperiodic = spectral::spectral_derivative(&periodic);
    let mut log_deriv = Vec::with_capacity(n);
    for (j, d) in dperiodic.iter().enumerate() {
        let w1 = 1.0 + d;
        if w1 <= 0.0 {
            return Err(Error::NonMonotoneWelding { index: j });
        }
        log_deriv.push(w1.ln());
    }
    Ok(Welding {
        map: BoundaryFunction::from_samples(samples),
        lift,
        log_derivative: BoundaryFunction::from_real_samples(log_deriv),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::family;
    use crate::quadrature;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coeffs: &[f64]) -> AnalyticDiskMap {
        AnalyticDiskMap::from_taylor(coeffs.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn circle_solves_to_identity() {
        let map = solve_interior_map(&family::circle(), c(0.0, 0.0), 256, 1e-12).unwrap();
        assert!((map.derivative_at_zero() - c(1.0, 0.0)).norm() < 1e-13);
        let others: f64 = map
            .taylor()
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != 1)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        assert!(others < 1e-12);
    }

    #[test]
    fn translated_circle_solves_to_shift() {
        let curve = family::circle_with(1.0, c(1.0, 1.0), 512).unwrap();
        let map = solve_interior_map(&curve, c(1.0, 1.0), 256, 1e-12).unwrap();
        assert!((map.value_at_zero() - c(1.0, 1.0)).norm() < 1e-12);
        assert!((map.derivative_at_zero() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ellipse_boundary_residual() {
        let curve = family::ellipse(0.2).unwrap();
        let map = solve_interior_map(&curve, c(0.0, 0.0), 1024, 1e-12).unwrap();
        assert!(map.residual < 1e-10, "residual {:.3e}", map.residual);
        assert!(map.normalization.derivative_real_positive);
        // correspondence is strictly increasing
        let corr = map.boundary_correspondence().unwrap();
        assert!(corr.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn polynomial_coefficients_recovered() {
        let coeffs = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.1, 0.0)];
        let curve = family::power_series_image(coeffs.clone(), 1024).unwrap();
        let map = solve_interior_map(&curve, c(0.0, 0.0), 1024, 1e-12).unwrap();
        for k in 0..coeffs.len() {
            assert!(
                (map.taylor()[k] - coeffs[k]).norm() < 1e-8,
                "coefficient {k} off by {:.3e}",
                (map.taylor()[k] - coeffs[k]).norm()
            );
        }
        let tail: f64 = map.taylor()[coeffs.len()..]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(tail < 1e-8);
    }

    #[test]
    fn exterior_of_circle_is_identity() {
        let map = solve_exterior_via_inversion(&family::circle(), &SolverConfig::default()).unwrap();
        assert_eq!(map.role, MapRole::InteriorOfInvertedComplement);
        assert!((map.derivative_at_zero() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn exterior_of_scaled_circle() {
        let curve = family::circle_with(2.0, c(0.0, 0.0), 512).unwrap();
        let map = solve_exterior_via_inversion(&curve, &SolverConfig::default()).unwrap();
        assert!((map.derivative_at_zero() - c(0.5, 0.0)).norm() < 1e-12);
        let ext = ExteriorMap::new(&map).unwrap();
        assert!((ext.derivative_at_infinity_abs() - 2.0).abs() < 1e-11);
    }

    #[test]
    fn exterior_of_ellipse_matches_joukowski() {
        // the exterior map of e^{it} + rho e^{-it} is z + rho/z, so
        // g_tilde(z) = z/(1 + rho z^2) and |g'(inf)| = 1
        let rho = 0.2;
        let curve = family::ellipse(rho).unwrap();
        let map = solve_exterior_via_inversion(&curve, &SolverConfig::default()).unwrap();
        let ext = ExteriorMap::new(&map).unwrap();
        assert!((ext.derivative_at_infinity_abs() - 1.0).abs() < 1e-8);
        for k in 0..6 {
            let expect = if k % 2 == 1 {
                c((-rho as f64).powi((k as i32 - 1) / 2), 0.0)
            } else {
                c(0.0, 0.0)
            };
            assert!(
                (map.taylor()[k] - expect).norm() < 1e-9,
                "g~ coefficient {k}"
            );
        }
    }

    #[test]
    fn eval_examples() {
        let id = poly(&[0.0, 1.0]);
        let (f, fp, fpp) = id.eval(c(0.3, 0.0)).unwrap();
        assert_eq!((f, fp, fpp), (c(0.3, 0.0), c(1.0, 0.0), c(0.0, 0.0)));
        assert_eq!(id.tail_bound, 0.0);

        let cubic = poly(&[0.0, 1.0, 0.0, 0.1]);
        let (f, fp, fpp) = cubic.eval(c(0.5, 0.0)).unwrap();
        assert!((f - c(0.5125, 0.0)).norm() < 1e-15);
        assert!((fp - c(1.075, 0.0)).norm() < 1e-15);
        assert!((fpp - c(0.3, 0.0)).norm() < 1e-15);

        assert!(matches!(
            cubic.eval(c(0.9999995, 0.0)),
            Err(Error::OutOfRadius { .. })
        ));
    }

    #[test]
    fn derivative_zero_in_disk_is_rejected() {
        // f' = 1 + 1.2 z vanishes at -5/6
        let err = AnalyticDiskMap::from_taylor(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.6, 0.0)]);
        assert!(matches!(err, Err(Error::NonUnivalent { .. })));
    }

    #[test]
    fn shrink_examples() {
        let id = poly(&[0.0, 1.0]);
        let sh = id.shrink(0.1).unwrap();
        assert_eq!(sh.taylor(), id.taylor());

        let quintic = poly(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.1]);
        let sh = quintic.shrink(0.01).unwrap();
        assert!((sh.taylor()[5].re - 0.1 * 0.99f64.powi(4)).abs() < 1e-15);
        assert_eq!(sh.taylor()[1], c(1.0, 0.0)); // k = 1 exponent is zero

        let off = poly(&[0.5, 1.0]);
        assert!(matches!(
            off.shrink(0.1),
            Err(Error::NonzeroConstantTerm { .. })
        ));
    }

    #[test]
    fn circle_grid_matches_horner() {
        let map = poly(&[0.0, 1.0, 0.05, 0.0, 0.02]);
        let ring = map.eval_on_circle(0.77, 64);
        for j in 0..64 {
            let z = Complex64::from_polar(0.77, 2.0 * PI * j as f64 / 64.0);
            let (f, fp, fpp) = map.eval_unchecked(z);
            assert!((ring.f[j] - f).norm() < 1e-13);
            assert!((ring.fp[j] - fp).norm() < 1e-13);
            assert!((ring.fpp[j] - fpp).norm() < 1e-13);
        }
    }

    #[test]
    fn solver_self_consistency_under_node_doubling() {
        // re-solving with 2N nodes moves S1-type integrals by less than
        // 10x the reported tail bound
        let curve = family::ellipse(0.3).unwrap();
        let rule = quadrature::default_rule();
        let mut values = Vec::new();
        for n in [1024usize, 2048] {
            let map = solve_interior_map(&curve, c(0.0, 0.0), n, 1e-11).unwrap();
            let v = rule
                .integrate_disk(|z| {
                    let (_, fp, fpp) = map.eval_unchecked(z);
                    (fpp / fp).norm_sqr()
                })
                .unwrap();
            values.push((v, map.tail_bound));
        }
        let diff = (values[0].0 - values[1].0).abs();
        assert!(
            diff < 10.0 * values[0].1,
            "diff {:.3e} vs tail bound {:.3e}",
            diff,
            values[0].1
        );
    }

    #[test]
    fn interior_inverted_integral_identity() {
        // integral_D |g~''/g~'|^2 = integral_{C \ D} |g''/g' - 2g'/g + 2/z|^2,
        // left directly, right via the exterior pullback rule
        let curve = family::ellipse(0.3).unwrap();
        let gt = solve_exterior_via_inversion(&curve, &SolverConfig::default()).unwrap();
        let rule = quadrature::default_rule();
        let left = rule
            .integrate_disk(|z| {
                let (_, gp, gpp) = gt.eval_unchecked(z);
                (gpp / gp).norm_sqr()
            })
            .unwrap();
        let ext = ExteriorMap::new(&gt).unwrap();
        let right = rule
            .integrate_exterior(|z| {
                let r = ext.ratios(z).unwrap();
                (r.pre_schwarzian - 2.0 * r.log_deriv + 2.0 / z).norm_sqr()
            })
            .unwrap();
        assert!(
            (left - right).abs() <= 1e-6 * left.max(1.0),
            "left {left} right {right}"
        );
    }

    #[test]
    fn welding_of_circle_is_rigid_rotation() {
        let curve = family::circle();
        let f = solve_interior_map(&curve, c(0.0, 0.0), 512, 1e-12).unwrap();
        let gt = solve_exterior_via_inversion(
            &curve,
            &SolverConfig {
                n: 512,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        let weld = welding(&f, &gt).unwrap();
        let h_half = quadrature::sobolev_seminorm(&weld.log_derivative, 0.5);
        assert!(h_half < 1e-10, "H^1/2 of log w' = {h_half:.3e}");
        // constant-derivative lift
        for w in weld.lift.windows(2) {
            assert!((w[1] - w[0] - 2.0 * PI / 512.0).abs() < 1e-10);
        }
    }

    #[test]
    fn welding_of_ellipse_is_increasing() {
        let curve = family::ellipse(0.2).unwrap();
        let f = solve_interior_map(&curve, c(0.0, 0.0), 1024, 1e-11).unwrap();
        let gt = solve_exterior_via_inversion(&curve, &SolverConfig::default()).unwrap();
        let weld = welding(&f, &gt).unwrap();
        assert!(weld.lift.windows(2).all(|w| w[1] > w[0]));
        // w' > 0 at all nodes
        for s in &weld.log_derivative.samples {
            assert!(s.re.is_finite());
        }
    }

    #[test]
    fn welding_rejects_mismatched_curves() {
        let a = family::circle();
        let b = family::ellipse(0.2).unwrap();
        let fa = solve_interior_map(&a, c(0.0, 0.0), 512, 1e-12).unwrap();
        let gb = solve_exterior_via_inversion(
            &b,
            &SolverConfig {
                n: 512,
                ..SolverConfig::default()
            },
        )
        .unwrap();
        assert!(matches!(
            welding(&fa, &gb),
            Err(Error::MismatchedCurves { .. })
        ));
    }

    #[test]
    fn solver_rejects_bad_inputs() {
        let curve = family::ellipse(0.2).unwrap();
        assert!(matches!(
            solve_interior_map(&curve, c(5.0, 0.0), 256, 1e-12),
            Err(Error::CenterOutside { .. })
        ));
        let spiral = family::spiral_arc(0.3).unwrap();
        assert!(matches!(
            solve_interior_map(&spiral, c(0.0, 0.0), 256, 1e-12),
            Err(Error::NotClosed)
        ));
    }

    #[test]
    fn map_json_roundtrip() {
        let curve = family::ellipse(0.2).unwrap();
        let map = solve_interior_map(&curve, c(0.0, 0.0), 512, 1e-11).unwrap();
        let text = map.to_json().unwrap();
        let back = AnalyticDiskMap::from_json(&text).unwrap();
        assert_eq!(back.taylor(), map.taylor());
        assert_eq!(back.role, map.role);
        assert!((back.residual - map.residual).abs() == 0.0);
    }
}
