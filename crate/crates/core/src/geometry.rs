//! Curve representations, stereographic projection, and the built-in test
//! curve families.
//!
//! A [`ParametricCurve`] stores a closed-form parametrization `t -> gamma(e^{it})`
//! together with a fixed power-of-two sample count so that discrete Fourier
//! analysis of trigonometric-polynomial boundaries is exact. All values are
//! immutable after construction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default sample count for curve construction.
pub const DEFAULT_SAMPLES: usize = 1024;

/// A point on the unit sphere in R^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpherePoint {
    /// Unit-norm tolerance of the type invariant.
    pub const UNIT_TOL: f64 = 1e-12;

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let p = SpherePoint { x, y, z };
        if (p.norm_sq() - 1.0).abs() > Self::UNIT_TOL {
            return Err(Error::InvalidParameter {
                kind: "sphere point",
                msg: format!("|({x}, {y}, {z})|^2 deviates from 1 by more than 1e-12"),
            });
        }
        Ok(p)
    }

    pub fn north() -> Self {
        SpherePoint { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn south() -> Self {
        SpherePoint { x: 0.0, y: 0.0, z: -1.0 }
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// Inverse stereographic projection `z -> (2 Re z, 2 Im z, -1 + |z|^2) / (1 + |z|^2)`,
/// sending 0 to the south pole and infinity to the north pole.
pub fn inverse_stereographic(z: Complex64) -> SpherePoint {
    let d = 1.0 + z.norm_sqr();
    SpherePoint {
        x: 2.0 * z.re / d,
        y: 2.0 * z.im / d,
        z: (-1.0 + z.norm_sqr()) / d,
    }
}

/// Gradient norm `|grad pi^{-1}(z)| = 2 sqrt(2) / (1 + |z|^2)` of the inverse
/// stereographic projection viewed as a map into R^3.
pub fn inverse_stereographic_grad_norm(z: Complex64) -> f64 {
    2.0 * 2.0_f64.sqrt() / (1.0 + z.norm_sqr())
}

/// Stereographic projection `(x, y, z) -> (x + iy) / (1 - z)`. Errors at the
/// north pole (distance below 1e-12).
pub fn stereographic(p: &SpherePoint) -> Result<Complex64> {
    let dist_to_pole = (2.0 * (1.0 - p.z).max(0.0)).sqrt();
    if dist_to_pole < 1e-12 {
        return Err(Error::NorthPole);
    }
    Ok(Complex64::new(p.x, p.y) / (1.0 - p.z))
}

/// Closed-form curve kinds. `Inverted` and `Translated` wrap another kind;
/// they arise from the inversion `z -> 1/z` and from recentring.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveKind {
    Circle {
        radius: f64,
        center: Complex64,
    },
    /// Joukowski image `center + e^{it} + rho e^{-it}` of the unit circle,
    /// an ellipse with semiaxes `1 + rho` and `1 - rho`.
    Ellipse {
        rho: f64,
        center: Complex64,
    },
    /// Image `p(e^{it})` of the unit circle under a polynomial `p` given by
    /// its Taylor coefficients `a_0..a_M`.
    PowerSeriesImage {
        coeffs: Vec<Complex64>,
    },
    /// Trigonometric polynomial `sum_{|k| <= K} c_k e^{ikt}`; `coeffs[j]`
    /// holds `c_{j - K}` and the length must be odd.
    FourierBoundary {
        coeffs: Vec<Complex64>,
    },
    /// Open spiral arc `t e^{i log log t}`, `t` in `(0, epsilon)`, with the
    /// logarithm branch continued from the upper half-plane. Sample-only:
    /// not a closed Jordan curve, rejected by the energy operations.
    SpiralArc {
        epsilon: f64,
    },
    Inverted {
        inner: Box<CurveKind>,
    },
    Translated {
        inner: Box<CurveKind>,
        offset: Complex64,
    },
}

impl CurveKind {
    fn eval(&self, t: f64) -> Complex64 {
        let eit = Complex64::from_polar(1.0, t);
        match self {
            CurveKind::Circle { radius, center } => center + radius * eit,
            CurveKind::Ellipse { rho, center } => center + eit + rho * eit.conj(),
            CurveKind::PowerSeriesImage { coeffs } => horner(coeffs, eit),
            CurveKind::FourierBoundary { coeffs } => {
                let order = (coeffs.len() - 1) / 2;
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, c) in coeffs.iter().enumerate() {
                    let k = j as i64 - order as i64;
                    acc += c * Complex64::from_polar(1.0, k as f64 * t);
                }
                acc
            }
            CurveKind::SpiralArc { .. } => spiral_point(t),
            CurveKind::Inverted { inner } => 1.0 / inner.eval(t),
            CurveKind::Translated { inner, offset } => inner.eval(t) + offset,
        }
    }

    /// d gamma / dt.
    fn eval_derivative(&self, t: f64) -> Complex64 {
        let eit = Complex64::from_polar(1.0, t);
        let i = Complex64::new(0.0, 1.0);
        match self {
            CurveKind::Circle { radius, .. } => radius * i * eit,
            CurveKind::Ellipse { rho, .. } => i * eit - i * rho * eit.conj(),
            CurveKind::PowerSeriesImage { coeffs } => {
                let dp: Vec<Complex64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| c * k as f64)
                    .collect();
                horner(&dp, eit) * i * eit
            }
            CurveKind::FourierBoundary { coeffs } => {
                let order = (coeffs.len() - 1) / 2;
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, c) in coeffs.iter().enumerate() {
                    let k = j as i64 - order as i64;
                    acc += c * i * k as f64 * Complex64::from_polar(1.0, k as f64 * t);
                }
                acc
            }
            CurveKind::SpiralArc { .. } => spiral_tangent(t),
            CurveKind::Inverted { inner } => {
                let g = inner.eval(t);
                -inner.eval_derivative(t) / (g * g)
            }
            CurveKind::Translated { inner, .. } => inner.eval_derivative(t),
        }
    }

    fn is_closed(&self) -> bool {
        match self {
            CurveKind::SpiralArc { .. } => false,
            CurveKind::Inverted { inner } | CurveKind::Translated { inner, .. } => {
                inner.is_closed()
            }
            _ => true,
        }
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Spiral point `t e^{i log log t}` with the principal logarithm continued
/// from the upper half-plane (`log t` is real negative for `t < 1`, so the
/// outer log lands on the branch with argument pi).
pub fn spiral_point(t: f64) -> Complex64 {
    let lg = Complex64::new(t, 0.0).ln().ln();
    t * (Complex64::new(0.0, 1.0) * lg).exp()
}

fn spiral_tangent(t: f64) -> Complex64 {
    // f'(t) = (1 + i / log t) e^{i log log t}
    let lg1 = Complex64::new(t, 0.0).ln();
    let phase = (Complex64::new(0.0, 1.0) * lg1.ln()).exp();
    (1.0 + Complex64::new(0.0, 1.0) / lg1) * phase
}

/// A Jordan curve (or sample-only open arc) with cached uniform samples.
#[derive(Debug, Clone)]
pub struct ParametricCurve {
    pub kind: CurveKind,
    pub n: usize,
    pub samples: Vec<Complex64>,
    pub closed: bool,
    pub positively_oriented: bool,
    pub id: u64,
}

impl ParametricCurve {
    /// Build a curve, cache `n` uniform samples and run the sampled
    /// self-intersection scan (closed kinds only).
    pub fn new(kind: CurveKind, n: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::InvalidParameter {
                kind: "sample count",
                msg: format!("{n} is not a power of two"),
            });
        }
        validate_kind(&kind)?;
        let closed = kind.is_closed();
        let samples: Vec<Complex64> = if closed {
            (0..n).map(|k| kind.eval(2.0 * PI * k as f64 / n as f64)).collect()
        } else {
            // open arc on (0, epsilon): avoid the endpoint singularities
            let eps = match &kind {
                CurveKind::SpiralArc { epsilon } => *epsilon,
                _ => unreachable!(),
            };
            (0..n)
                .map(|k| kind.eval(eps * (k + 1) as f64 / (n + 1) as f64))
                .collect()
        };
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter {
                kind: "curve",
                msg: "non-finite boundary sample".into(),
            });
        }
        let crossings = count_self_intersections(&samples, closed);
        if crossings > 0 {
            return Err(Error::SelfIntersecting { crossings, n });
        }
        let positively_oriented = closed && signed_area(&samples) > 0.0;
        let id = fingerprint(&kind, n);
        Ok(ParametricCurve {
            kind,
            n,
            samples,
            closed,
            positively_oriented,
            id,
        })
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.kind.eval(t)
    }

    pub fn eval_derivative(&self, t: f64) -> Complex64 {
        self.kind.eval_derivative(t)
    }

    /// Minimum sampled |gamma|.
    pub fn min_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Winding number of the sampled curve about `p`.
    pub fn winding_number(&self, p: Complex64) -> i64 {
        let mut total = 0.0;
        for k in 0..self.samples.len() {
            let a = self.samples[k] - p;
            let b = self.samples[(k + 1) % self.samples.len()] - p;
            total += (b / a).arg();
        }
        (total / (2.0 * PI)).round() as i64
    }

    /// True when `p` is strictly inside (winding +-1 and not within `tol` of
    /// the boundary samples).
    pub fn contains(&self, p: Complex64) -> bool {
        if !self.closed {
            return false;
        }
        let dist = self
            .samples
            .iter()
            .map(|z| (z - p).norm())
            .fold(f64::INFINITY, f64::min);
        dist > 1e-9 && self.winding_number(p).abs() == 1
    }

    /// A point strictly inside the curve (sample centroid, validated).
    pub fn interior_point(&self) -> Result<Complex64> {
        let n = self.samples.len() as f64;
        let centroid = self.samples.iter().sum::<Complex64>() / n;
        if self.contains(centroid) {
            Ok(centroid)
        } else {
            Err(Error::InvalidParameter {
                kind: "curve",
                msg: "no interior point found (sample centroid lies outside)".into(),
            })
        }
    }

    /// Sampled star-likeness about `p`: the argument of `gamma - p` must be
    /// strictly monotone with total increment +-2pi.
    pub fn is_star_like_about(&self, p: Complex64) -> bool {
        if !self.closed {
            return false;
        }
        let angles: Vec<f64> = self.samples.iter().map(|z| (z - p).arg()).collect();
        let lift = crate::spectral::unwrap_angles(&angles);
        let total = lift[lift.len() - 1] - lift[0]
            + crate::spectral::wrap_to_pi(angles[0] - angles[angles.len() - 1]);
        if (total.abs() - 2.0 * PI).abs() > 1e-6 {
            return false;
        }
        let sign = total.signum();
        lift.windows(2).all(|w| (w[1] - w[0]) * sign > 0.0)
    }

    /// The inverted curve `t -> 1/gamma(t)`; errors when the curve passes
    /// within 1e-9 of the origin. Orientation flips.
    pub fn inverted(&self) -> Result<ParametricCurve> {
        let min_abs = self.min_abs();
        if min_abs <= 1e-9 {
            return Err(Error::CurveThroughOrigin { min_abs });
        }
        ParametricCurve::new(
            CurveKind::Inverted {
                inner: Box::new(self.kind.clone()),
            },
            self.n,
        )
    }

    /// The translated curve `t -> gamma(t) + offset`.
    pub fn translated(&self, offset: Complex64) -> Result<ParametricCurve> {
        let kind = match &self.kind {
            CurveKind::Circle { radius, center } => CurveKind::Circle {
                radius: *radius,
                center: center + offset,
            },
            CurveKind::Ellipse { rho, center } => CurveKind::Ellipse {
                rho: *rho,
                center: center + offset,
            },
            CurveKind::PowerSeriesImage { coeffs } => {
                let mut c = coeffs.clone();
                c[0] += offset;
                CurveKind::PowerSeriesImage { coeffs: c }
            }
            CurveKind::Translated { inner, offset: prev } => CurveKind::Translated {
                inner: inner.clone(),
                offset: prev + offset,
            },
            other => CurveKind::Translated {
                inner: Box::new(other.clone()),
                offset,
            },
        };
        ParametricCurve::new(kind, self.n)
    }

    /// Curve definition file (JSON). Schema documented in `docs/formats.md`.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct File<'a> {
            #[serde(flatten)]
            kind: &'a CurveKind,
            n: usize,
        }
        Ok(serde_json::to_string_pretty(&File { kind: &self.kind, n: self.n })?)
    }

    pub fn from_json(text: &str) -> Result<ParametricCurve> {
        #[derive(Deserialize)]
        struct File {
            #[serde(flatten)]
            kind: CurveKind,
            #[serde(default = "default_n")]
            n: usize,
        }
        fn default_n() -> usize {
            DEFAULT_SAMPLES
        }
        let file: File = serde_json::from_str(text)?;
        ParametricCurve::new(file.kind, file.n)
    }
}

fn validate_kind(kind: &CurveKind) -> Result<()> {
    match kind {
        CurveKind::Circle { radius, .. } => {
            if !(*radius > 0.0) {
                return Err(Error::InvalidParameter {
                    kind: "circle",
                    msg: format!("radius {radius} must be positive"),
                });
            }
        }
        CurveKind::Ellipse { rho, .. } => {
            // e^{it} + rho e^{-it} is a Jordan curve exactly for 0 <= rho < 1
            if !(0.0..1.0).contains(rho) {
                return Err(Error::InvalidParameter {
                    kind: "ellipse",
                    msg: format!("rho = {rho} is outside [0, 1)"),
                });
            }
        }
        CurveKind::PowerSeriesImage { coeffs } => {
            if coeffs.len() < 2 || coeffs[1].norm() == 0.0 {
                return Err(Error::InvalidParameter {
                    kind: "power-series-image",
                    msg: "need a nonzero linear coefficient".into(),
                });
            }
        }
        CurveKind::FourierBoundary { coeffs } => {
            if coeffs.len() % 2 == 0 || coeffs.len() < 3 {
                return Err(Error::InvalidParameter {
                    kind: "fourier-boundary",
                    msg: "coefficient list must have odd length >= 3 (k = -K..K)".into(),
                });
            }
        }
        CurveKind::SpiralArc { epsilon } => {
            if !(*epsilon > 0.0 && *epsilon <= 0.5) {
                return Err(Error::InvalidParameter {
                    kind: "spiral-arc",
                    msg: format!("epsilon = {epsilon} is outside (0, 1/2]"),
                });
            }
        }
        CurveKind::Inverted { inner } | CurveKind::Translated { inner, .. } => {
            validate_kind(inner)?
        }
    }
    Ok(())
}

fn signed_area(samples: &[Complex64]) -> f64 {
    let n = samples.len();
    let mut area = 0.0;
    for k in 0..n {
        let a = samples[k];
        let b = samples[(k + 1) % n];
        area += a.re * b.im - b.re * a.im;
    }
    area / 2.0
}

/// Sampled O(N^2) segment-intersection scan. Adjacent segments share an
/// endpoint and are skipped. Not a certified geometric predicate.
fn count_self_intersections(samples: &[Complex64], closed: bool) -> usize {
    let n = samples.len();
    let seg_count = if closed { n } else { n - 1 };
    let mut crossings = 0;
    for i in 0..seg_count {
        let (a1, a2) = (samples[i], samples[(i + 1) % n]);
        for j in (i + 2)..seg_count {
            if closed && i == 0 && j == seg_count - 1 {
                continue; // adjacent through the wrap-around
            }
            let (b1, b2) = (samples[j], samples[(j + 1) % n]);
            if segments_intersect(a1, a2, b1, b2) {
                crossings += 1;
            }
        }
    }
    crossings
}

fn segments_intersect(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> bool {
    let cross = |o: Complex64, p: Complex64, q: Complex64| -> f64 {
        (p.re - o.re) * (q.im - o.im) - (p.im - o.im) * (q.re - o.re)
    };
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// FNV-1a fingerprint of the kind and sample count; used to pair maps solved
/// against the same parametrization.
fn fingerprint(kind: &CurveKind, n: usize) -> u64 {
    let text = serde_json::to_string(kind).expect("curve kind serializes");
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in text.bytes().chain(n.to_le_bytes()) {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Built-in curve families at the default sample count.
pub mod family {
    use super::*;

    pub fn circle() -> ParametricCurve {
        ParametricCurve::new(
            CurveKind::Circle { radius: 1.0, center: Complex64::new(0.0, 0.0) },
            DEFAULT_SAMPLES,
        )
        .expect("unit circle is valid")
    }

    pub fn circle_with(radius: f64, center: Complex64, n: usize) -> Result<ParametricCurve> {
        ParametricCurve::new(CurveKind::Circle { radius, center }, n)
    }

    pub fn ellipse(rho: f64) -> Result<ParametricCurve> {
        ParametricCurve::new(
            CurveKind::Ellipse { rho, center: Complex64::new(0.0, 0.0) },
            DEFAULT_SAMPLES,
        )
    }

    pub fn ellipse_with(rho: f64, center: Complex64, n: usize) -> Result<ParametricCurve> {
        ParametricCurve::new(CurveKind::Ellipse { rho, center }, n)
    }

    /// Image of the unit circle under the polynomial with coefficients
    /// `a_0..a_M`.
    pub fn power_series_image(coeffs: Vec<Complex64>, n: usize) -> Result<ParametricCurve> {
        ParametricCurve::new(CurveKind::PowerSeriesImage { coeffs }, n)
    }

    pub fn fourier_boundary(coeffs: Vec<Complex64>, n: usize) -> Result<ParametricCurve> {
        ParametricCurve::new(CurveKind::FourierBoundary { coeffs }, n)
    }

    pub fn spiral_arc(epsilon: f64) -> Result<ParametricCurve> {
        ParametricCurve::new(CurveKind::SpiralArc { epsilon }, DEFAULT_SAMPLES)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn south_pole_and_equator() {
        let p = inverse_stereographic(c(0.0, 0.0));
        assert_eq!((p.x, p.y, p.z), (0.0, 0.0, -1.0));
        let q = inverse_stereographic(c(1.0, 0.0));
        assert!((q.x - 1.0).abs() < 1e-15 && q.y.abs() < 1e-15 && q.z.abs() < 1e-15);
    }

    #[test]
    fn gradient_norm_at_origin() {
        assert!((inverse_stereographic_grad_norm(c(0.0, 0.0)) - 2.0 * 2.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stereographic_inverse_pairs() {
        assert_eq!(stereographic(&SpherePoint::south()).unwrap(), c(0.0, 0.0));
        let one = stereographic(&SpherePoint::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            stereographic(&SpherePoint::north()),
            Err(Error::NorthPole)
        ));
    }

    #[test]
    fn projection_output_is_unit() {
        for k in 0..100 {
            let z = c(0.13 * k as f64 - 5.0, 0.07 * k as f64 - 3.0);
            let p = inverse_stereographic(z);
            assert!((p.norm_sq() - 1.0).abs() <= SpherePoint::UNIT_TOL);
        }
    }

    proptest! {
        #[test]
        fn roundtrip_on_random_points(re in -50.0f64..50.0, im in -50.0f64..50.0) {
            let z = c(re, im);
            let back = stereographic(&inverse_stereographic(z)).unwrap();
            prop_assert!((back - z).norm() <= 1e-13 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn roundtrip_dense_grid_max_error() {
        // 10^4 deterministic pseudo-random points
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut max_err: f64 = 0.0;
        for _ in 0..10_000 {
            let z = c(20.0 * next() - 10.0, 20.0 * next() - 10.0);
            let back = stereographic(&inverse_stereographic(z)).unwrap();
            max_err = max_err.max((back - z).norm());
        }
        assert!(max_err < 1e-13, "max roundtrip error {max_err:.3e}");
    }

    #[test]
    fn unit_circle_inverts_to_itself() {
        let circle = family::circle();
        let inv = circle.inverted().unwrap();
        for s in &inv.samples {
            assert!((s.norm() - 1.0).abs() < 1e-14);
        }
        assert!(!inv.positively_oriented);
    }

    #[test]
    fn circle_radius_two_inverts_to_half() {
        let circle = family::circle_with(2.0, c(0.0, 0.0), 256).unwrap();
        let inv = circle.inverted().unwrap();
        for s in &inv.samples {
            assert!((s.norm() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn translated_ellipse_inverts_pointwise() {
        let curve = family::ellipse_with(0.2, c(3.0, 0.0), 512).unwrap();
        let inv = curve.inverted().unwrap();
        for k in 0..512 {
            let t = 2.0 * PI * k as f64 / 512.0;
            let expect = 1.0 / curve.eval(t);
            assert!((inv.eval(t) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn inversion_is_an_involution() {
        let curve = family::ellipse_with(0.3, c(2.5, 1.0), 256).unwrap();
        let twice = curve.inverted().unwrap().inverted().unwrap();
        for (a, b) in curve.samples.iter().zip(&twice.samples) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn inversion_rejects_curve_through_origin() {
        let curve = family::ellipse_with(0.2, c(1.0, 0.0), 256).unwrap();
        // passes through 1 - 1.2 = -0.2 .. but shifted by 1: min |gamma| small?
        // use a curve genuinely through 0: circle of radius 1 centered at 1
        let through = family::circle_with(1.0, c(1.0, 0.0), 256).unwrap();
        assert!(matches!(
            through.inverted(),
            Err(Error::CurveThroughOrigin { .. })
        ));
        let _ = curve;
    }

    #[test]
    fn family_examples() {
        let circle = family::circle();
        assert!((circle.eval(0.4) - Complex64::from_polar(1.0, 0.4)).norm() < 1e-15);
        let ell = family::ellipse(0.2).unwrap();
        for k in 0..16 {
            let t = 2.0 * PI * k as f64 / 16.0;
            let expect = Complex64::from_polar(1.0, t) + 0.2 * Complex64::from_polar(1.0, -t);
            assert!((ell.eval(t) - expect).norm() < 1e-15);
        }
        assert!(matches!(
            family::ellipse(1.0),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn power_series_image_passes_intersection_scan() {
        let coeffs = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.1, 0.0)];
        let curve = ParametricCurve::new(CurveKind::PowerSeriesImage { coeffs }, 4096).unwrap();
        assert!(curve.positively_oriented);
    }

    #[test]
    fn looping_power_series_is_rejected() {
        // z + 0.6 z^2 maps the circle onto a curve with a loop
        let coeffs = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.6, 0.0)];
        assert!(matches!(
            ParametricCurve::new(CurveKind::PowerSeriesImage { coeffs }, 1024),
            Err(Error::SelfIntersecting { .. })
        ));
    }

    #[test]
    fn star_like_checks() {
        let ell = family::ellipse(0.3).unwrap();
        assert!(ell.is_star_like_about(c(0.0, 0.0)));
        assert!(ell.is_star_like_about(c(0.5, 0.0)));
        assert!(!ell.is_star_like_about(c(2.0, 0.0)));
        assert!(ell.inverted().unwrap().is_star_like_about(c(0.0, 0.0)));
    }

    #[test]
    fn winding_and_contains() {
        let ell = family::ellipse_with(0.2, c(3.0, 0.0), 512).unwrap();
        assert!(ell.contains(c(3.0, 0.0)));
        assert!(!ell.contains(c(0.0, 0.0)));
        assert_eq!(ell.winding_number(c(3.0, 0.0)), 1);
    }

    #[test]
    fn spiral_arc_is_open_and_rejected_from_closed_ops() {
        let spiral = family::spiral_arc(0.3).unwrap();
        assert!(!spiral.closed);
        // points lie on t e^{-pi} |.|: |gamma(t)| = t e^{-pi}
        for (k, s) in spiral.samples.iter().enumerate() {
            let t = 0.3 * (k + 1) as f64 / (spiral.n + 1) as f64;
            assert!((s.norm() - t * (-PI).exp()).abs() < 1e-12);
        }
        assert!(matches!(
            family::spiral_arc(0.7),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn curve_json_roundtrip() {
        let curve = family::ellipse_with(0.25, c(0.5, -0.25), 512).unwrap();
        let text = curve.to_json().unwrap();
        let back = ParametricCurve::from_json(&text).unwrap();
        assert_eq!(back.kind, curve.kind);
        assert_eq!(back.n, 512);
        assert_eq!(back.id, curve.id);
    }
}
