//! Explicit harmonic moving frames built from a conformal map, and numerical
//! verification of the identities they satisfy.
//!
//! For a univalent `f` on the disk the frame at `z != 0` is
//! `u = Im(chi psi)`, `v = Re(chi psi)` with
//! `chi = conj(z f') / |z f'|` and
//! `psi = ((1 - f^2), i(1 + f^2), 2f) / (1 + |f|^2)`,
//! a null vector of square norm 2. The normal is the inverse stereographic
//! projection of `f(z)`. The conformal factor is
//! `mu = log|f'| - log(1 + |f|^2) + log 2`, satisfying the Liouville
//! equation `-lap mu = e^{2 mu}`; the Cartan form decomposes as
//! `<u, dz v> = -(i/2)(f''/f' - 2 f' conj(f)/(1+|f|^2) + 1/z)`.
//!
//! z-derivatives of `f` are analytic (from the Taylor data); finite
//! differences enter only where an identity involves second derivatives of
//! non-holomorphic composites (`mu`, `phi`), so the FD error is isolated in
//! the residual checks.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::conformal::{AnalyticDiskMap, BoundaryFunction, EVAL_RADIUS};
use crate::error::{Error, Result};
use crate::geometry::{inverse_stereographic, SpherePoint};
use crate::quadrature::{gauss_legendre, sobolev_seminorm, KahanSum};

/// The frame is undefined at the puncture; points closer than this are
/// rejected.
pub const PUNCTURE_RADIUS: f64 = 1e-6;

type CVec3 = [Complex64; 3];

/// Conformal factor `mu(z) = log|f'(z)| - log(1 + |f(z)|^2) + log 2` of the
/// sphere-valued map `pi^{-1} o f`. (A common alternative convention drops
/// the additive `log 2`; this module keeps it throughout.)
pub fn mu_of(map: &AnalyticDiskMap, z: Complex64) -> Result<f64> {
    let (f, fp, _) = map.eval(z)?;
    if fp.norm() < 1e-14 {
        return Err(Error::VanishingDerivative { z });
    }
    Ok(mu_from_map_values(f, fp))
}

/// `mu` from raw map values `(f, f')`; shared with the energy assembly.
#[inline]
pub fn mu_from_map_values(f: Complex64, fp: Complex64) -> f64 {
    fp.norm().ln() - (1.0 + f.norm_sqr()).ln() + std::f64::consts::LN_2
}

fn mu_unchecked(map: &AnalyticDiskMap, z: Complex64) -> f64 {
    let (f, fp, _) = map.eval_unchecked(z);
    mu_from_map_values(f, fp)
}

/// The null vector `psi(f) = ((1 - f^2), i(1 + f^2), 2f) / (1 + |f|^2)`:
/// `<psi, psi> = 0` (bilinear) and `|psi|^2 = 2`.
pub fn null_vector(f: Complex64) -> CVec3 {
    let d = 1.0 + f.norm_sqr();
    let i = Complex64::new(0.0, 1.0);
    [(1.0 - f * f) / d, i * (1.0 + f * f) / d, 2.0 * f / d]
}

fn phi_from_values(z: Complex64, f: Complex64, fp: Complex64) -> CVec3 {
    let zfp = z * fp;
    let chi = zfp.conj() / zfp.norm();
    let psi = null_vector(f);
    [chi * psi[0], chi * psi[1], chi * psi[2]]
}

fn bilinear(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn real_part(a: &CVec3) -> [f64; 3] {
    [a[0].re, a[1].re, a[2].re]
}

fn imag_part(a: &CVec3) -> [f64; 3] {
    [a[0].im, a[1].im, a[2].im]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Pointwise residuals carried by a [`FrameSample`]. Orthonormality and the
/// Cartan identity come from closed forms; the Laplacian-based residuals are
/// filled by the finite-difference operations.
#[derive(Debug, Clone, Copy)]
pub struct FrameResiduals {
    /// max deviation of `|u|, |v|, |n|` from 1 and of the pairwise inner
    /// products from 0
    pub orthonormality: f64,
    /// |<u, dz v> + (i/2)(f''/f' - 2 f' conj f/(1+|f|^2) + 1/z)|
    pub cartan: f64,
    pub liouville: Option<f64>,
    pub harmonicity_phi: Option<f64>,
    pub harmonicity_phi_bar: Option<f64>,
}

/// The frame triple at one disk point.
#[derive(Debug, Clone)]
pub struct FrameSample {
    pub z: Complex64,
    pub u: SpherePoint,
    pub v: SpherePoint,
    pub n: SpherePoint,
    pub mu: f64,
    /// Cartan form value `<u, dz v>`.
    pub cartan: Complex64,
    pub residuals: FrameResiduals,
}

/// Holomorphic-data derivatives of `phi = chi psi`:
/// `dz chi = -1/2 (f''/f' + 1/z) chi`, `dzbar chi = +1/2 conj(f''/f' + 1/z) chi`,
/// `dz psi = -(f' conj f/(1+|f|^2)) psi + (2 f'/(1+|f|^2)) (-f, i f, 1)`,
/// `dzbar psi = -(conj(f') f/(1+|f|^2)) psi`.
fn phi_derivatives(
    z: Complex64,
    f: Complex64,
    fp: Complex64,
    fpp: Complex64,
) -> (CVec3, CVec3, CVec3) {
    let d = 1.0 + f.norm_sqr();
    let i = Complex64::new(0.0, 1.0);
    let phi = phi_from_values(z, f, fp);
    let q = fpp / fp + 1.0 / z;
    let extra = [-f, i * f, Complex64::new(1.0, 0.0)];
    let zfp = z * fp;
    let chi = zfp.conj() / zfp.norm();
    let mut dz = [Complex64::new(0.0, 0.0); 3];
    let mut dzbar = [Complex64::new(0.0, 0.0); 3];
    let dz_scalar = -0.5 * q - fp * f.conj() / d;
    let dzbar_scalar = 0.5 * q.conj() - fp.conj() * f / d;
    for k in 0..3 {
        dz[k] = dz_scalar * phi[k] + (2.0 * fp / d) * chi * extra[k];
        dzbar[k] = dzbar_scalar * phi[k];
    }
    (phi, dz, dzbar)
}

fn frame_guard(map: &AnalyticDiskMap, z: Complex64) -> Result<(Complex64, Complex64, Complex64)> {
    if z.norm() < PUNCTURE_RADIUS {
        return Err(Error::OriginInput { abs: z.norm() });
    }
    let (f, fp, fpp) = map.eval(z)?;
    if fp.norm() < 1e-14 {
        return Err(Error::VanishingDerivative { z });
    }
    Ok((f, fp, fpp))
}

/// Construct the frame at `z`. `flip_sign` selects the other branch of the
/// square root in `chi`; the two choices differ by a global sign of `(u, v)`
/// and leave the Cartan form unchanged.
pub fn frame_at_signed(
    map: &AnalyticDiskMap,
    z: Complex64,
    flip_sign: bool,
) -> Result<FrameSample> {
    let (f, fp, fpp) = frame_guard(map, z)?;
    let sign = if flip_sign { -1.0 } else { 1.0 };
    let (mut phi, mut dzphi, mut dzbarphi) = phi_derivatives(z, f, fp, fpp);
    for k in 0..3 {
        phi[k] *= sign;
        dzphi[k] *= sign;
        dzbarphi[k] *= sign;
    }
    let u = imag_part(&phi);
    let v = real_part(&phi);
    let n_point = inverse_stereographic(f);
    let n = [n_point.x, n_point.y, n_point.z];

    // dz v = 1/2 (dz phi + conj(dzbar phi))
    let mut dzv = [Complex64::new(0.0, 0.0); 3];
    for k in 0..3 {
        dzv[k] = 0.5 * (dzphi[k] + dzbarphi[k].conj());
    }
    let cartan = Complex64::new(
        u[0] * dzv[0].re + u[1] * dzv[1].re + u[2] * dzv[2].re,
        u[0] * dzv[0].im + u[1] * dzv[1].im + u[2] * dzv[2].im,
    );

    let ortho = [
        (dot3(&u, &u) - 1.0).abs(),
        (dot3(&v, &v) - 1.0).abs(),
        (dot3(&n, &n) - 1.0).abs(),
        dot3(&u, &v).abs(),
        dot3(&u, &n).abs(),
        dot3(&v, &n).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let expected = -0.5
        * Complex64::new(0.0, 1.0)
        * (fpp / fp - 2.0 * fp * f.conj() / (1.0 + f.norm_sqr()) + 1.0 / z);
    let cartan_res = (cartan - expected).norm();

    Ok(FrameSample {
        z,
        u: SpherePoint { x: u[0], y: u[1], z: u[2] },
        v: SpherePoint { x: v[0], y: v[1], z: v[2] },
        n: n_point,
        mu: mu_from_map_values(f, fp),
        cartan,
        residuals: FrameResiduals {
            orthonormality: ortho,
            cartan: cartan_res,
            liouville: None,
            harmonicity_phi: None,
            harmonicity_phi_bar: None,
        },
    })
}

pub fn frame_at(map: &AnalyticDiskMap, z: Complex64) -> Result<FrameSample> {
    frame_at_signed(map, z, false)
}

/// Cartan form `<u, dz v>` from raw map values; shared with the energy
/// assembly that rebuilds the Dirichlet density from the frames.
pub fn cartan_form_values(
    z: Complex64,
    f: Complex64,
    fp: Complex64,
    fpp: Complex64,
) -> Complex64 {
    let (phi, dzphi, dzbarphi) = phi_derivatives(z, f, fp, fpp);
    let u = imag_part(&phi);
    let mut out = Complex64::new(0.0, 0.0);
    for k in 0..3 {
        let dzv = 0.5 * (dzphi[k] + dzbarphi[k].conj());
        out += Complex64::new(u[k] * dzv.re, u[k] * dzv.im);
    }
    out
}

/// `<u, dz v> + (i/2)(f''/f' - 2 f' conj f/(1+|f|^2) + 1/z)`; identically 0
/// in exact arithmetic.
pub fn cartan_residual(map: &AnalyticDiskMap, z: Complex64) -> Result<Complex64> {
    let (f, fp, fpp) = frame_guard(map, z)?;
    let cartan = cartan_form_values(z, f, fp, fpp);
    Ok(cartan
        + 0.5
            * Complex64::new(0.0, 1.0)
            * (fpp / fp - 2.0 * fp * f.conj() / (1.0 + f.norm_sqr()) + 1.0 / z))
}

fn stencil_guard(z: Complex64, h: f64, min_radius: f64) -> Result<()> {
    if z.norm() + h > EVAL_RADIUS {
        return Err(Error::StencilOutsideDomain { abs: z.norm(), h });
    }
    if z.norm() < min_radius {
        return Err(Error::StencilOutsideDomain { abs: z.norm(), h });
    }
    Ok(())
}

/// Five-point residual of the Liouville equation `-lap mu = e^{2 mu}` at each
/// grid point; O(h^2) for analytic maps.
pub fn liouville_residual(
    map: &AnalyticDiskMap,
    points: &[Complex64],
    h: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(points.len());
    for &z in points {
        stencil_guard(z, h, 0.0)?;
        let lap = (mu_unchecked(map, z + h)
            + mu_unchecked(map, z - h)
            + mu_unchecked(map, z + Complex64::new(0.0, h))
            + mu_unchecked(map, z - Complex64::new(0.0, h))
            - 4.0 * mu_unchecked(map, z))
            / (h * h);
        let (f, fp, _) = map.eval_unchecked(z);
        let e2mu = (2.0 * mu_from_map_values(f, fp)).exp();
        out.push((lap + e2mu).abs());
    }
    Ok(out)
}

/// Both constrained-harmonicity residuals `Im <lap phi, phi>` and
/// `Im <lap phi, conj phi>` via a five-point Laplacian of `phi`, plus the
/// real part `Re <lap phi, conj phi>` which the identity
/// `<lap phi, conj phi> = -8 |f'|^2/(1+|f|^2)^2 - 4 |dzbar phi|^2`
/// forces to be strictly negative.
#[derive(Debug, Clone, Copy)]
pub struct HarmonicityResidual {
    pub im_phi: f64,
    pub im_phi_bar: f64,
    pub re_phi_bar: f64,
}

pub fn harmonicity_residuals(
    map: &AnalyticDiskMap,
    z: Complex64,
    h: f64,
) -> Result<HarmonicityResidual> {
    stencil_guard(z, h, 10.0 * h)?;
    let phi_at = |w: Complex64| -> CVec3 {
        let (f, fp, _) = map.eval_unchecked(w);
        phi_from_values(w, f, fp)
    };
    let center = phi_at(z);
    let xp = phi_at(z + h);
    let xm = phi_at(z - h);
    let yp = phi_at(z + Complex64::new(0.0, h));
    let ym = phi_at(z - Complex64::new(0.0, h));
    let mut lap = [Complex64::new(0.0, 0.0); 3];
    for k in 0..3 {
        lap[k] = (xp[k] + xm[k] + yp[k] + ym[k] - 4.0 * center[k]) / (h * h);
    }
    let with_phi = bilinear(&lap, &center);
    let conj_center = [center[0].conj(), center[1].conj(), center[2].conj()];
    let with_phi_bar = bilinear(&lap, &conj_center);
    Ok(HarmonicityResidual {
        im_phi: with_phi.im.abs(),
        im_phi_bar: with_phi_bar.im.abs(),
        re_phi_bar: with_phi_bar.re,
    })
}

/// Geodesic-curvature samples along a circle and the `H^{-1/2}` seminorm of
/// the trace.
#[derive(Debug, Clone)]
pub struct CurvatureTrace {
    pub angles: Vec<f64>,
    pub k: Vec<f64>,
    pub sobolev_minus_half: f64,
}

impl CurvatureTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,k\n");
        for (a, k) in self.angles.iter().zip(&self.k) {
            out.push_str(&format!("{a:.17e},{k:.17e}\n"));
        }
        out
    }
}

/// Geodesic curvature of the image circle of radius `r_eval` in the round
/// metric: `k = Re(z f''/f' - 2 z f' conj(f)/(1+|f|^2)) + 1`, regular
/// everywhere including zeros of `f`.
pub fn geodesic_curvature_disk(
    map: &AnalyticDiskMap,
    n_angles: usize,
    r_eval: f64,
) -> Result<CurvatureTrace> {
    if !(0.0 < r_eval && r_eval < 1.0) {
        return Err(Error::RadiusError { r: r_eval, h: 0.0 });
    }
    let ring = map.eval_on_circle(r_eval, n_angles);
    let mut angles = Vec::with_capacity(n_angles);
    let mut k = Vec::with_capacity(n_angles);
    for j in 0..n_angles {
        let theta = 2.0 * PI * j as f64 / n_angles as f64;
        let z = Complex64::from_polar(r_eval, theta);
        let (f, fp, fpp) = (ring.f[j], ring.fp[j], ring.fpp[j]);
        angles.push(theta);
        k.push((z * fpp / fp - 2.0 * z * fp * f.conj() / (1.0 + f.norm_sqr())).re + 1.0);
    }
    let b = BoundaryFunction::from_real_samples(k.clone());
    let sobolev_minus_half = sobolev_seminorm(&b, -0.5);
    Ok(CurvatureTrace {
        angles,
        k,
        sobolev_minus_half,
    })
}

/// Half-plane geodesic curvature from pre-Schwarzian samples on the real
/// line: `k = Im(f''/f')`.
pub fn geodesic_curvature_halfplane(pre_schwarzian: &[Complex64]) -> Vec<f64> {
    pre_schwarzian.iter().map(|v| v.im).collect()
}

/// Residual of the Neumann boundary relation `d_r mu = (k - 1)/r` (the
/// interior extension of `d_nu mu = k_{g0} - d_nu G` in disk coordinates),
/// with a central difference in the radius. Exact up to FD error.
pub fn neumann_residual(
    map: &AnalyticDiskMap,
    n_angles: usize,
    r_eval: f64,
    h: f64,
) -> Result<Vec<f64>> {
    if !(h > 0.0 && r_eval - h > 0.0 && r_eval + h < 1.0) {
        return Err(Error::RadiusError { r: r_eval, h });
    }
    let ring = map.eval_on_circle(r_eval, n_angles);
    let outer = map.eval_on_circle(r_eval + h, n_angles);
    let inner = map.eval_on_circle(r_eval - h, n_angles);
    let mut out = Vec::with_capacity(n_angles);
    for j in 0..n_angles {
        let theta = 2.0 * PI * j as f64 / n_angles as f64;
        let z = Complex64::from_polar(r_eval, theta);
        let dmu = (mu_from_map_values(outer.f[j], outer.fp[j])
            - mu_from_map_values(inner.f[j], inner.fp[j]))
            / (2.0 * h);
        let (f, fp, fpp) = (ring.f[j], ring.fp[j], ring.fpp[j]);
        let k = (z * fpp / fp - 2.0 * z * fp * f.conj() / (1.0 + f.norm_sqr())).re + 1.0;
        out.push(dmu - (k - 1.0) / r_eval);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Spiral arc diagnostics
// ---------------------------------------------------------------------------

/// Pre-Schwarzian of the spiral `f(z) = z e^{i log log z}` (principal branch
/// continued from the upper half-plane):
/// `f''/f' = i (log z - 1 + i) / (z log z (log z + i))`.
pub fn spiral_pre_schwarzian(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let lg = z.ln();
    i * (lg - 1.0 + i) / (z * lg * (lg + i))
}

/// Closed rational form of `|f''/f'|^2` for the spiral, with `L = log|z|`
/// and `A = arg z`:
/// `((L-1)^2 + (1+A)^2) / (|z|^2 (L^2 + A^2)(L^2 + (1+A)^2))`.
pub fn spiral_integrand(z: Complex64) -> f64 {
    let l = z.norm().ln();
    let a = z.arg();
    ((l - 1.0) * (l - 1.0) + (1.0 + a) * (1.0 + a))
        / (z.norm_sqr() * (l * l + a * a) * (l * l + (1.0 + a) * (1.0 + a)))
}

/// Pointwise geodesic curvature of the spiral trace on the positive real
/// axis: `k(t) = -1/(t (1 + log^2 t)) + 1/(t log t)`.
pub fn spiral_curvature(t: f64) -> f64 {
    let l = t.ln();
    -1.0 / (t * (1.0 + l * l)) + 1.0 / (t * l)
}

/// Finiteness bound `4 pi / log 2 + 4 pi / (3 log^2 2)` asserted for the
/// half-disk energy of the spiral.
pub fn spiral_energy_bound() -> f64 {
    let l = std::f64::consts::LN_2;
    4.0 * PI / l + 4.0 * PI / (3.0 * l * l)
}

/// Integral of `|f''/f'|^2` over the upper half-disk of radius `epsilon`
/// with the core `|z| < 1e-8` removed, computed by Gauss panels in
/// `(log r, theta)` coordinates where the integrand is smooth.
pub fn spiral_diagnostics(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidParameter {
            kind: "spiral diagnostics",
            msg: format!("epsilon = {epsilon} is outside (0, 1/2]"),
        });
    }
    let core: f64 = 1e-8;
    let (xs, ws) = gauss_legendre(32);
    let u0 = core.ln();
    let u1 = epsilon.ln();
    let n_u = 24;
    let n_t = 8;
    let mut acc = KahanSum::new();
    for iu in 0..n_u {
        let a = u0 + (u1 - u0) * iu as f64 / n_u as f64;
        let b = u0 + (u1 - u0) * (iu + 1) as f64 / n_u as f64;
        for (xu, wu) in xs.iter().zip(&ws) {
            let u = 0.5 * (a + b) + 0.5 * (b - a) * xu;
            let wu = 0.5 * (b - a) * wu;
            let r = u.exp();
            for it in 0..n_t {
                let c = PI * it as f64 / n_t as f64;
                let d = PI * (it + 1) as f64 / n_t as f64;
                for (xt, wt) in xs.iter().zip(&ws) {
                    let theta = 0.5 * (c + d) + 0.5 * (d - c) * xt;
                    let wt = 0.5 * (d - c) * wt;
                    let z = Complex64::from_polar(r, theta);
                    // r dr dtheta = r^2 du dtheta
                    acc.add(spiral_integrand(z) * r * r * wu * wt);
                }
            }
        }
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::default_rule;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coeffs: &[f64]) -> AnalyticDiskMap {
        AnalyticDiskMap::from_taylor(coeffs.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    fn identity() -> AnalyticDiskMap {
        poly(&[0.0, 1.0])
    }

    fn cubic() -> AnalyticDiskMap {
        poly(&[0.0, 1.0, 0.0, 0.1])
    }

    #[test]
    fn mu_examples() {
        let id = identity();
        assert!((mu_of(&id, c(0.0, 0.0)).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        for k in 1..10 {
            let z = c(0.07 * k as f64, -0.03 * k as f64);
            let expect = std::f64::consts::LN_2 - (1.0 + z.norm_sqr()).ln();
            assert!((mu_of(&id, z).unwrap() - expect).abs() < 1e-14);
        }
        let double = poly(&[0.0, 2.0]);
        assert!(
            (mu_of(&double, c(0.0, 0.0)).unwrap() - 2.0 * std::f64::consts::LN_2).abs() < 1e-15
        );
    }

    #[test]
    fn frame_of_identity_at_one() {
        let sample = frame_at(&identity(), c(1.0 - 2e-6, 0.0)).unwrap();
        // u along the equator, v toward the pole, n the base point
        assert!((sample.u.x.abs()) < 1e-5 && (sample.u.y - 1.0).abs() < 1e-5);
        assert!((sample.v.z - 1.0).abs() < 1e-5);
        assert!((sample.n.x - 1.0).abs() < 1e-5);
        assert!(sample.residuals.orthonormality < 1e-12);
    }

    #[test]
    fn null_vector_identities() {
        for k in 0..25 {
            let f = c(0.3 * (k as f64).sin(), 0.4 * (k as f64).cos());
            let psi = null_vector(f);
            let sq = bilinear(&psi, &psi);
            assert!(sq.norm() < 1e-14, "<psi,psi> = {sq}");
            let norm2: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
            assert!((norm2 - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn orthonormality_on_random_points() {
        let map = cubic();
        let mut max_un: f64 = 0.0;
        for k in 0..100 {
            let r = 0.15 + 0.8 * (k as f64 / 100.0);
            let z = Complex64::from_polar(r, 2.399963 * k as f64);
            let s = frame_at(&map, z).unwrap();
            max_un = max_un.max(s.residuals.orthonormality);
            let un = s.u.x * s.n.x + s.u.y * s.n.y + s.u.z * s.n.z;
            assert!(un.abs() < 1e-12);
        }
        assert!(max_un < 1e-12);
    }

    #[test]
    fn frame_rejects_puncture_and_critical_points() {
        let map = cubic();
        assert!(matches!(
            frame_at(&map, c(1e-8, 0.0)),
            Err(Error::OriginInput { .. })
        ));
    }

    #[test]
    fn cartan_residual_examples() {
        assert!(cartan_residual(&identity(), c(0.5, 0.0)).unwrap().norm() < 1e-12);
        let quad = poly(&[0.0, 1.0, 0.05]);
        assert!(cartan_residual(&quad, c(0.3, 0.2)).unwrap().norm() < 1e-10);
        let map = cubic();
        let mut max_res: f64 = 0.0;
        for j in 0..512 {
            let z = Complex64::from_polar(0.9, 2.0 * PI * j as f64 / 512.0);
            max_res = max_res.max(cartan_residual(&map, z).unwrap().norm());
        }
        assert!(max_res < 1e-9, "cartan max {max_res:.3e}");
    }

    #[test]
    fn branch_sign_flips_frame_not_cartan() {
        let map = cubic();
        let z = c(0.4, 0.3);
        let a = frame_at_signed(&map, z, false).unwrap();
        let b = frame_at_signed(&map, z, true).unwrap();
        assert!((a.u.x + b.u.x).abs() < 1e-15);
        assert!((a.v.z + b.v.z).abs() < 1e-15);
        assert!((a.cartan - b.cartan).norm() < 1e-12);
    }

    #[test]
    fn liouville_residual_decays_quadratically() {
        let pts = [c(0.5, 0.0), c(0.3, 0.2), c(-0.2, 0.4)];
        for map in [identity(), cubic()] {
            let coarse = liouville_residual(&map, &pts, 1e-3).unwrap();
            let fine = liouville_residual(&map, &pts, 5e-4).unwrap();
            let rc = coarse.iter().cloned().fold(0.0, f64::max);
            let rf = fine.iter().cloned().fold(0.0, f64::max);
            assert!(rc < 1e-4, "residual {rc:.3e}");
            let ratio = rc / rf;
            assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
        }
        let id_res = liouville_residual(&identity(), &pts, 1e-3).unwrap();
        assert!(id_res.iter().cloned().fold(0.0, f64::max) < 1e-5);
    }

    #[test]
    fn harmonicity_residuals_small_and_defect_negative() {
        let id = identity();
        let r = harmonicity_residuals(&id, c(0.5, 0.0), 1e-3).unwrap();
        assert!(r.im_phi < 1e-5 && r.im_phi_bar < 1e-5);
        assert!(r.re_phi_bar < 0.0);

        let quad = poly(&[0.0, 1.0, 0.05]);
        let r = harmonicity_residuals(&quad, c(0.0, 0.4), 1e-3).unwrap();
        assert!(r.im_phi < 1e-4 && r.im_phi_bar < 1e-4);
        assert!(r.re_phi_bar < 0.0);
    }

    #[test]
    fn harmonicity_ratio_test() {
        let quad = poly(&[0.0, 1.0, 0.05]);
        let z = c(0.35, 0.25);
        let rc = harmonicity_residuals(&quad, z, 2e-3).unwrap();
        let rf = harmonicity_residuals(&quad, z, 1e-3).unwrap();
        let ratio = rc.im_phi_bar / rf.im_phi_bar;
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn equator_curvature_vanishes() {
        let trace = geodesic_curvature_disk(&identity(), 64, 1.0 - 1e-6).unwrap();
        for k in &trace.k {
            assert!(k.abs() < 1e-5, "equator k = {k:.3e}");
        }
    }

    #[test]
    fn scaled_circle_curvature_constant() {
        // f = 2z at r -> 1: k = 1 - 8 r^2/(1 + 4 r^2) -> -3/5
        let trace = geodesic_curvature_disk(&poly(&[0.0, 2.0]), 128, 1.0 - 1e-9).unwrap();
        let spread = trace.k.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - trace.k.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-12);
        assert!((trace.k[0] + 0.6).abs() < 1e-7);
    }

    #[test]
    fn halfplane_curvature_examples() {
        // straight line
        let zero = geodesic_curvature_halfplane(&[c(0.0, 0.0); 4]);
        assert!(zero.iter().all(|v| *v == 0.0));
        // f = z^2 on a segment off the origin: f''/f' = 1/z is real on reals
        let vals: Vec<Complex64> = (1..6).map(|k| 1.0 / c(0.2 * k as f64, 0.0)).collect();
        for v in geodesic_curvature_halfplane(&vals) {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn spiral_curvature_matches_pre_schwarzian() {
        for t in [1e-2, 1e-3] {
            let k = geodesic_curvature_halfplane(&[spiral_pre_schwarzian(c(t, 0.0))])[0];
            assert!(
                (k - spiral_curvature(t)).abs() < 1e-8 * spiral_curvature(t).abs(),
                "t = {t}"
            );
        }
    }

    #[test]
    fn spiral_integrand_dual_evaluation() {
        for &z in &[c(0.0, 0.01), c(0.003, 0.004), c(-0.02, 0.05), c(0.3, 0.1)] {
            let direct = spiral_pre_schwarzian(z).norm_sqr();
            let closed = spiral_integrand(z);
            assert!(
                (direct - closed).abs() < 1e-10 * closed,
                "mismatch at {z}: {direct} vs {closed}"
            );
        }
    }

    #[test]
    fn spiral_energy_below_bound_and_monotone() {
        let half = spiral_diagnostics(0.5).unwrap();
        let tenth = spiral_diagnostics(0.1).unwrap();
        assert!(half < spiral_energy_bound());
        assert!(tenth < half);
        assert!(matches!(
            spiral_diagnostics(0.7),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn neumann_residual_examples() {
        let id_res = neumann_residual(&identity(), 64, 0.999, 1e-4).unwrap();
        assert!(id_res.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-6);
        let two = neumann_residual(&poly(&[0.0, 2.0]), 64, 0.999, 1e-4).unwrap();
        assert!(two.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-6);
        let cubic_res = neumann_residual(&cubic(), 64, 0.999, 1e-4).unwrap();
        assert!(cubic_res.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-4);
        assert!(matches!(
            neumann_residual(&identity(), 8, 0.9999, 1e-3),
            Err(Error::RadiusError { .. })
        ));
    }

    #[test]
    fn curvature_trace_sobolev_stable_under_doubling() {
        let curve = crate::geometry::family::ellipse(0.2).unwrap();
        let map = crate::conformal::solve_interior_map(&curve, c(0.0, 0.0), 1024, 1e-11).unwrap();
        let base = geodesic_curvature_disk(&map, 512, 1.0 - 1e-6).unwrap();
        let fine = geodesic_curvature_disk(&map, 1024, 1.0 - 1e-6).unwrap();
        let rel = (base.sobolev_minus_half - fine.sobolev_minus_half).abs()
            / fine.sobolev_minus_half;
        assert!(base.sobolev_minus_half.is_finite());
        assert!(rel < 1e-6, "relative change {rel:.3e}");
    }

    #[test]
    fn dirichlet_energy_rotation_invariance() {
        // integral |grad(mu o f)|^2 is unchanged by precomposition with a
        // disk rotation
        let rule = default_rule();
        let density = |map: &AnalyticDiskMap, z: Complex64| {
            let (f, fp, fpp) = map.eval_unchecked(z);
            let dmu = 0.5 * fpp / fp - fp * f.conj() / (1.0 + f.norm_sqr());
            4.0 * dmu.norm_sqr()
        };
        let map = cubic();
        let alpha = 0.7345;
        let rot = Complex64::from_polar(1.0, alpha);
        let rotated = AnalyticDiskMap::from_taylor(
            map.taylor()
                .iter()
                .enumerate()
                .map(|(k, a)| a * rot.powu(k as u32))
                .collect(),
        )
        .unwrap();
        let a = rule.integrate_disk(|z| density(&map, z)).unwrap();
        let b = rule.integrate_disk(|z| density(&rotated, z)).unwrap();
        assert!((a - b).abs() < 1e-12, "diff {:.3e}", (a - b).abs());
    }
}
