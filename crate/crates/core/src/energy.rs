//! The four Loewner-energy formulas and their cross-checks.
//!
//! Every operation returns `pi * I^L` (the scale of the plain-map action) so
//! residuals compare like with like; callers divide by pi for display. The
//! exterior map is always reached through the inverted interior map
//! `g(z) = 1/g_tilde(1/z)`; exterior integrals are pulled back to the disk.
//! Integrands with a removable singularity at 0 (the `2/z` corrections with
//! `f(0) = 0`) are evaluated through the exact rational rearrangement
//! `f'/f - 1/z = h1(z)/(f(z)/z)` of shifted Taylor data, so no node is ever
//! near a pole.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::conformal::{
    map_grid, poly_grid, solve_exterior_via_inversion, solve_interior_with, AnalyticDiskMap,
    MapGrid, SolverConfig,
};
use crate::error::{Error, Result};
use crate::frames::{cartan_form_values, mu_from_map_values};
use crate::geometry::{CurveKind, ParametricCurve};
use crate::quadrature::{disk_rule, DiskQuadrature, KahanSum};

const LN2: f64 = std::f64::consts::LN_2;

/// One named term of a formula's breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
}

/// A formula value together with its per-term breakdown; the value is the
/// compensated sum of the terms (bookkeeping identity, exact by
/// construction).
#[derive(Debug, Clone, Serialize)]
pub struct FormulaValue {
    pub value: f64,
    pub terms: Vec<Term>,
}

impl FormulaValue {
    fn from_terms(terms: Vec<Term>) -> Self {
        let mut acc = KahanSum::new();
        for t in &terms {
            acc.add(t.value);
        }
        FormulaValue {
            value: acc.value(),
            terms,
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// Recompute the compensated sum of the stored terms.
    pub fn sum_of_terms(&self) -> f64 {
        let mut acc = KahanSum::new();
        for t in &self.terms {
            acc.add(t.value);
        }
        acc.value()
    }
}

fn check_nondegenerate(map: &AnalyticDiskMap) -> Result<()> {
    let d = map.derivative_at_zero().norm();
    if d < 1e-12 {
        return Err(Error::DegenerateMap { value: d });
    }
    Ok(())
}

fn check_centered(map: &AnalyticDiskMap) -> Result<()> {
    let a0 = map.value_at_zero();
    if a0.norm() > 1e-10 {
        return Err(Error::NonzeroConstantTerm { a0 });
    }
    Ok(())
}

fn check_same_curve(f: &AnalyticDiskMap, g_tilde: &AnalyticDiskMap) -> Result<()> {
    if let (Some(a), Some(b)) = (f.curve_id, g_tilde.curve_id) {
        if a != b {
            return Err(Error::MismatchedCurves { first: a, second: b });
        }
    }
    Ok(())
}

/// Evaluations of one map on a quadrature grid, with the shifted-series
/// values needed by the singular-corrected integrands.
struct GridData {
    f: Vec<Complex64>,
    fp: Vec<Complex64>,
    fpp: Vec<Complex64>,
    /// `f(z)/z` (only present when `a_0 = 0`)
    over_z: Option<Vec<Complex64>>,
    /// `h1(z) = sum_{k>=2} (k-1) a_k z^{k-2}`, so `f'/f - 1/z = h1/(f/z)`
    h1: Option<Vec<Complex64>>,
}

fn grid_data(map: &AnalyticDiskMap, radii: &[f64], n_theta: usize, shifted: bool) -> GridData {
    let MapGrid { f, fp, fpp } = map_grid(map, radii, n_theta);
    let (over_z, h1) = if shifted {
        let h1_coeffs: Vec<Complex64> = map
            .taylor()
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, c)| c * (k as f64 - 1.0))
            .collect();
        (
            Some(poly_grid(&map.taylor()[1..], radii, n_theta)),
            Some(poly_grid(&h1_coeffs, radii, n_theta)),
        )
    } else {
        (None, None)
    };
    GridData {
        f,
        fp,
        fpp,
        over_z,
        h1,
    }
}

/// Integrate `value(index, z)` over the plain grid.
fn integrate_plain<F>(rule: &DiskQuadrature, value: F) -> Result<f64>
where
    F: FnMut(usize, Complex64) -> f64,
{
    let vals = collect_values(&rule.radial.r, rule, value);
    rule.integrate_values(&vals)
}

/// Integrate `log|z| * value(index, z)` over the origin-refined grid.
fn integrate_log<F>(rule: &DiskQuadrature, value: F) -> Result<f64>
where
    F: FnMut(usize, Complex64) -> f64,
{
    let vals = collect_values(&rule.radial_log.r, rule, value);
    rule.integrate_values_log(&vals)
}

fn collect_values<F>(radii: &[f64], rule: &DiskQuadrature, mut value: F) -> Vec<f64>
where
    F: FnMut(usize, Complex64) -> f64,
{
    let mut vals = Vec::with_capacity(radii.len() * rule.n_theta);
    let mut idx = 0;
    for &r in radii {
        for j in 0..rule.n_theta {
            let z = Complex64::from_polar(r, rule.theta(j));
            vals.push(value(idx, z));
            idx += 1;
        }
    }
    vals
}

/// Plain-map action
/// `S1 = int_D |f''/f'|^2 + int_{C\D} |g''/g'|^2 + 4 pi log|f'(0)| - 4 pi log|g'(inf)|`.
/// The exterior integral is pulled back through `g = 1/g_tilde(1/z)`, under
/// which its integrand becomes `|G''/G' - 2 G'/G + 2/w|^2` on the disk.
pub fn s1(
    f: &AnalyticDiskMap,
    g_tilde: &AnalyticDiskMap,
    rule: &DiskQuadrature,
) -> Result<FormulaValue> {
    check_same_curve(f, g_tilde)?;
    check_nondegenerate(f)?;
    check_nondegenerate(g_tilde)?;
    check_centered(g_tilde)?;
    let fg = grid_data(f, &rule.radial.r, rule.n_theta, false);
    let gg = grid_data(g_tilde, &rule.radial.r, rule.n_theta, true);
    let interior = integrate_plain(rule, |i, _| (fg.fpp[i] / fg.fp[i]).norm_sqr())?;
    let (g_over, g_h1) = (gg.over_z.as_ref().unwrap(), gg.h1.as_ref().unwrap());
    let exterior = integrate_plain(rule, |i, _| {
        (gg.fpp[i] / gg.fp[i] - 2.0 * g_h1[i] / g_over[i]).norm_sqr()
    })?;
    Ok(FormulaValue::from_terms(vec![
        Term { name: "interior_pre_schwarzian", value: interior },
        Term { name: "exterior_pre_schwarzian", value: exterior },
        Term {
            name: "log_derivative_center",
            value: 4.0 * PI * f.derivative_at_zero().norm().ln(),
        },
        Term {
            name: "log_derivative_infinity",
            value: 4.0 * PI * g_tilde.derivative_at_zero().norm().ln(),
        },
    ]))
}

/// Inverted-curve form of the action (the inversion-invariance identity):
/// both pre-Schwarzians carry the `-2 h'/h + 2/z` correction, which swaps
/// the roles of the two maps under the pullback. Requires `f(0) = 0`.
pub fn s1_inverted(
    f: &AnalyticDiskMap,
    g_tilde: &AnalyticDiskMap,
    rule: &DiskQuadrature,
) -> Result<FormulaValue> {
    check_same_curve(f, g_tilde)?;
    check_nondegenerate(f)?;
    check_nondegenerate(g_tilde)?;
    check_centered(f)?;
    check_centered(g_tilde)?;
    let fg = grid_data(f, &rule.radial.r, rule.n_theta, true);
    let gg = grid_data(g_tilde, &rule.radial.r, rule.n_theta, false);
    let (f_over, f_h1) = (fg.over_z.as_ref().unwrap(), fg.h1.as_ref().unwrap());
    let interior = integrate_plain(rule, |i, _| {
        (fg.fpp[i] / fg.fp[i] - 2.0 * f_h1[i] / f_over[i]).norm_sqr()
    })?;
    let exterior = integrate_plain(rule, |i, _| (gg.fpp[i] / gg.fp[i]).norm_sqr())?;
    Ok(FormulaValue::from_terms(vec![
        Term { name: "interior_inverted_pre_schwarzian", value: interior },
        Term { name: "exterior_inverted_pre_schwarzian", value: exterior },
        Term {
            name: "log_derivative_center",
            value: 4.0 * PI * f.derivative_at_zero().norm().ln(),
        },
        Term {
            name: "log_derivative_infinity",
            value: 4.0 * PI * g_tilde.derivative_at_zero().norm().ln(),
        },
    ]))
}

/// Spherical action with modified pre-Schwarzians and log-weighted spherical
/// area densities:
/// interior `|f''/f' - 2 f' conj(f)/(1+|f|^2)|^2` plus the pulled-back
/// exterior analogue, `+2 int log|z| rho_f - 2 int_{C\D} log|z| rho_g`,
/// `+4 pi + 4 pi log|f'(0)| - 4 pi log|g'(inf)| - 4 pi log(1+|f(0)|^2)`.
pub fn s3(
    f: &AnalyticDiskMap,
    g_tilde: &AnalyticDiskMap,
    rule: &DiskQuadrature,
) -> Result<FormulaValue> {
    check_same_curve(f, g_tilde)?;
    check_nondegenerate(f)?;
    check_nondegenerate(g_tilde)?;
    check_centered(f)?;
    check_centered(g_tilde)?;
    let fg = grid_data(f, &rule.radial.r, rule.n_theta, false);
    let interior = integrate_plain(rule, |i, _| {
        (fg.fpp[i] / fg.fp[i] - 2.0 * fg.fp[i] * fg.f[i].conj() / (1.0 + fg.f[i].norm_sqr()))
            .norm_sqr()
    })?;

    // exterior modified pre-Schwarzian, pulled back node-by-node through
    // g = 1/G(1/z): the assembled combination is -w^2 (G''/G' - 2 G' conj(G)/(1+|G|^2))
    // and the |w|^{-4} jacobian cancels the |w^2|^2
    let gg = grid_data(g_tilde, &rule.radial.r, rule.n_theta, true);
    let (g_over, g_h1) = (gg.over_z.as_ref().unwrap(), gg.h1.as_ref().unwrap());
    let exterior = integrate_plain(rule, |i, w| {
        let g_pre = -2.0 * w - w * w * gg.fpp[i] / gg.fp[i]
            + 2.0 * w * w * (gg.fp[i] / gg.f[i]);
        let g_log_deriv = w * w * gg.fp[i] / gg.f[i];
        // |g|^2/(1+|g|^2) with g = 1/G equals 1/(1+|G|^2)
        let height = 1.0 / (1.0 + gg.f[i].norm_sqr());
        (g_pre - 2.0 * g_log_deriv * height + 2.0 * w).norm_sqr() / w.norm_sqr().powi(2)
    })?;
    let _ = (g_over, g_h1);

    let fl = grid_data(f, &rule.radial_log.r, rule.n_theta, false);
    let interior_log = 2.0
        * integrate_log(rule, |i, _| {
            4.0 * fl.fp[i].norm_sqr() / (1.0 + fl.f[i].norm_sqr()).powi(2)
        })?;
    let gl = grid_data(g_tilde, &rule.radial_log.r, rule.n_theta, false);
    // -2 int_{C\D} log|z| 4|g'|^2/(1+|g|^2)^2 pulls back to
    // +2 int_D log|w| 4|G'|^2/(1+|G|^2)^2
    let exterior_log = 2.0
        * integrate_log(rule, |i, _| {
            4.0 * gl.fp[i].norm_sqr() / (1.0 + gl.f[i].norm_sqr()).powi(2)
        })?;

    Ok(FormulaValue::from_terms(vec![
        Term { name: "interior_modified_pre_schwarzian", value: interior },
        Term { name: "exterior_modified_pre_schwarzian", value: exterior },
        Term { name: "interior_log_spherical", value: interior_log },
        Term { name: "exterior_log_spherical", value: exterior_log },
        Term { name: "four_pi", value: 4.0 * PI },
        Term {
            name: "log_derivative_center",
            value: 4.0 * PI * f.derivative_at_zero().norm().ln(),
        },
        Term {
            name: "log_derivative_infinity",
            value: 4.0 * PI * g_tilde.derivative_at_zero().norm().ln(),
        },
        Term {
            name: "center_height_log",
            value: -4.0 * PI * (1.0 + f.value_at_zero().norm_sqr()).ln(),
        },
    ]))
}

fn spherical_terms(
    map: &AnalyticDiskMap,
    rule: &DiskQuadrature,
    suffix: &'static str,
) -> Result<[Term; 4]> {
    let g = grid_data(map, &rule.radial.r, rule.n_theta, false);
    let dirichlet = integrate_plain(rule, |i, _| {
        (g.fpp[i] / g.fp[i] - 2.0 * g.fp[i] * g.f[i].conj() / (1.0 + g.f[i].norm_sqr()))
            .norm_sqr()
    })?;
    let gl = grid_data(map, &rule.radial_log.r, rule.n_theta, false);
    let green = integrate_log(rule, |i, _| {
        8.0 * gl.fp[i].norm_sqr() / (1.0 + gl.f[i].norm_sqr()).powi(2)
    })?;
    let area = integrate_plain(rule, |i, _| {
        4.0 * g.fp[i].norm_sqr() / (1.0 + g.f[i].norm_sqr()).powi(2)
    })?;
    let center = 4.0
        * PI
        * (1.5 * LN2 + map.derivative_at_zero().norm().ln()
            - (1.0 + map.value_at_zero().norm_sqr()).ln());
    let names: [&'static str; 4] = match suffix {
        "interior" => [
            "dirichlet_interior",
            "green_interior",
            "area_interior",
            "center_interior",
        ],
        _ => [
            "dirichlet_exterior",
            "green_exterior",
            "area_exterior",
            "center_exterior",
        ],
    };
    Ok([
        Term { name: names[0], value: dirichlet },
        Term { name: names[1], value: green },
        Term { name: names[2], value: area },
        Term { name: names[3], value: center },
    ])
}

/// Renormalised spherical energy: per domain
/// `int_D |grad log|grad f_j||^2 + int_D log|z| |grad f_j|^2 + Area(Omega_j)
///  + 4 pi log|grad f_j(0)|`, summed and shifted by `-12 pi log 2`, where
/// `|grad f_j|^2 = 8 |h'|^2/(1+|h|^2)^2` with `h = f` resp. `g_tilde`. Valid
/// for any interior center; returns `pi * I^L`.
pub fn e0_spherical(
    f: &AnalyticDiskMap,
    g_tilde: &AnalyticDiskMap,
    rule: &DiskQuadrature,
) -> Result<FormulaValue> {
    check_same_curve(f, g_tilde)?;
    check_nondegenerate(f)?;
    check_nondegenerate(g_tilde)?;
    check_centered(g_tilde)?;
    let mut terms = Vec::with_capacity(9);
    terms.extend(spherical_terms(f, rule, "interior")?);
    terms.extend(spherical_terms(g_tilde, rule, "exterior")?);
    terms.push(Term {
        name: "minus_twelve_log_two",
        value: -12.0 * PI * LN2,
    });
    Ok(FormulaValue::from_terms(terms))
}

fn frame_terms(
    map: &AnalyticDiskMap,
    rule: &DiskQuadrature,
    suffix: &'static str,
) -> Result<[Term; 4]> {
    let g = grid_data(map, &rule.radial.r, rule.n_theta, false);
    // |grad mu|^2 = 4 |i <u, dz v> - 1/(2z)|^2: the Cartan form of the
    // explicit frame recovers the Dirichlet density through the
    // decomposition omega = *d(G + mu) with G = log|z|
    let dirichlet = integrate_plain(rule, |i, z| {
        let cartan = cartan_form_values(z, g.f[i], g.fp[i], g.fpp[i]);
        4.0 * (Complex64::new(0.0, 1.0) * cartan - 0.5 / z).norm_sqr()
    })?;
    let gl = grid_data(map, &rule.radial_log.r, rule.n_theta, false);
    // 2 int G K dvol pulled back: int_D log|z| |grad f_j|^2 with
    // |grad f_j|^2 = 2 e^{2 mu}
    let green = integrate_log(rule, |i, _| {
        2.0 * (2.0 * mu_from_map_values(gl.f[i], gl.fp[i])).exp()
    })?;
    // Area(Omega_j) = (1/2) int |grad f_j|^2 = int e^{2 mu}
    let area = integrate_plain(rule, |i, _| {
        (2.0 * mu_from_map_values(g.f[i], g.fp[i])).exp()
    })?;
    let mu0 = mu_from_map_values(map.value_at_zero(), map.derivative_at_zero());
    let center = 4.0 * PI * (mu0 + 0.5 * LN2);
    let names: [&'static str; 4] = match suffix {
        "interior" => [
            "cartan_dirichlet_interior",
            "green_interior",
            "area_interior",
            "center_interior",
        ],
        _ => [
            "cartan_dirichlet_exterior",
            "green_exterior",
            "area_exterior",
            "center_exterior",
        ],
    };
    Ok([
        Term { name: names[0], value: dirichlet },
        Term { name: names[1], value: green },
        Term { name: names[2], value: area },
        Term { name: names[3], value: center },
    ])
}

/// Moving-frame assembly of the energy: per domain
/// `int |omega - *dG|^2 + 2 int G K + Area`, with the Dirichlet density
/// rebuilt from the Cartan form of the explicit frames and the Green term
/// from the conformal factor `mu`; constants as in [`e0_spherical`].
pub fn frame_energy_form(
    f: &AnalyticDiskMap,
    g_tilde: &AnalyticDiskMap,
    rule: &DiskQuadrature,
) -> Result<FormulaValue> {
    check_same_curve(f, g_tilde)?;
    check_nondegenerate(f)?;
    check_nondegenerate(g_tilde)?;
    check_centered(g_tilde)?;
    let mut terms = Vec::with_capacity(9);
    terms.extend(frame_terms(f, rule, "interior")?);
    terms.extend(frame_terms(g_tilde, rule, "exterior")?);
    terms.push(Term {
        name: "minus_twelve_log_two",
        value: -12.0 * PI * LN2,
    });
    Ok(FormulaValue::from_terms(terms))
}

/// Residual of the univalent-map identity obtained by comparing the
/// spherical action with its inversion-invariant form: two cross terms, two
/// squared terms, the two log-weighted spherical terms and `+4 pi`, summing
/// to zero for exact maps. Requires `f(0) = 0`.
pub fn grunsky_residual(
    f: &AnalyticDiskMap,
    g_tilde: &AnalyticDiskMap,
    rule: &DiskQuadrature,
) -> Result<f64> {
    check_same_curve(f, g_tilde)?;
    check_nondegenerate(f)?;
    check_nondegenerate(g_tilde)?;
    check_centered(f)?;
    check_centered(g_tilde)?;
    let fg = grid_data(f, &rule.radial.r, rule.n_theta, true);
    let (f_over, f_h1) = (fg.over_z.as_ref().unwrap(), fg.h1.as_ref().unwrap());
    // A = f''/f' - 2 f'/f + 2/z, B/2 = (f'/f)/(1+|f|^2) - 1/z, both through
    // the shifted-series forms
    let cross_interior = integrate_plain(rule, |i, _| {
        let d = 1.0 + fg.f[i].norm_sqr();
        let a = fg.fpp[i] / fg.fp[i] - 2.0 * f_h1[i] / f_over[i];
        let b_half = (f_h1[i] / f_over[i] - f_over[i] * fg.f[i].conj()) / d;
        4.0 * (a * b_half.conj()).re
    })?;
    let sq_interior = integrate_plain(rule, |i, _| {
        let d = 1.0 + fg.f[i].norm_sqr();
        let b_half = (f_h1[i] / f_over[i] - f_over[i] * fg.f[i].conj()) / d;
        4.0 * b_half.norm_sqr()
    })?;

    let gg = grid_data(g_tilde, &rule.radial.r, rule.n_theta, false);
    // pulled back: A_g(1/w) = -w^2 G''/G', (g'/g)/(1+|g|^2)|_{1/w} =
    // w^2 G' conj(G)/(1+|G|^2); the |w|^{-4} jacobian cancels
    let cross_exterior = integrate_plain(rule, |i, _| {
        let d = 1.0 + gg.f[i].norm_sqr();
        -4.0 * ((gg.fpp[i] / gg.fp[i]) * gg.fp[i].conj() * gg.f[i]).re / d
    })?;
    let sq_exterior = integrate_plain(rule, |i, _| {
        let d = 1.0 + gg.f[i].norm_sqr();
        4.0 * gg.fp[i].norm_sqr() * gg.f[i].norm_sqr() / (d * d)
    })?;

    let fl = grid_data(f, &rule.radial_log.r, rule.n_theta, false);
    let log_interior = 2.0
        * integrate_log(rule, |i, _| {
            4.0 * fl.fp[i].norm_sqr() / (1.0 + fl.f[i].norm_sqr()).powi(2)
        })?;
    let gl = grid_data(g_tilde, &rule.radial_log.r, rule.n_theta, false);
    let log_exterior = 2.0
        * integrate_log(rule, |i, _| {
            4.0 * gl.fp[i].norm_sqr() / (1.0 + gl.f[i].norm_sqr()).powi(2)
        })?;

    let mut acc = KahanSum::new();
    for v in [
        cross_interior,
        sq_interior,
        cross_exterior,
        sq_exterior,
        log_interior,
        log_exterior,
        4.0 * PI,
    ] {
        acc.add(v);
    }
    Ok(acc.value())
}

/// Configuration of a full energy computation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyConfig {
    pub solver: SolverConfig,
    pub panels: usize,
    pub gauss: usize,
    pub angles: usize,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            solver: SolverConfig::default(),
            panels: crate::quadrature::DEFAULT_PANELS,
            gauss: crate::quadrature::DEFAULT_GAUSS,
            angles: crate::quadrature::DEFAULT_THETA,
        }
    }
}

impl EnergyConfig {
    pub fn rule(&self) -> Result<DiskQuadrature> {
        disk_rule(self.panels, self.gauss, self.angles)
    }

    /// One resolution doubling: quadrature counts and solver nodes all
    /// doubled.
    pub fn doubled(&self) -> EnergyConfig {
        EnergyConfig {
            solver: SolverConfig {
                n: self.solver.n * 2,
                ..self.solver
            },
            panels: self.panels * 2,
            gauss: self.gauss * 2,
            angles: self.angles * 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualEntry {
    pub first: &'static str,
    pub second: &'static str,
    pub abs_difference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMetadata {
    pub curve_id: String,
    /// Translation applied so that 0 lies inside the curve.
    pub center_shift: Complex64,
    pub solver_n: usize,
    pub solver_tol: f64,
    pub quadrature_panels: usize,
    pub quadrature_gauss: usize,
    pub quadrature_angles: usize,
    pub interior_residual: f64,
    pub interior_tail_bound: f64,
    pub exterior_residual: f64,
    pub exterior_tail_bound: f64,
}

/// The four formula values, the frame assembly, their pairwise residuals and
/// the identity residual for one curve.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub s1: FormulaValue,
    pub s1_inverted: FormulaValue,
    pub s3: FormulaValue,
    pub e0_spherical: FormulaValue,
    pub frame_energy_form: FormulaValue,
    pub grunsky_residual: f64,
    pub residuals: Vec<ResidualEntry>,
    pub max_residual: f64,
    pub metadata: ReportMetadata,
}

impl EnergyReport {
    /// The Loewner energy `I^L = S1 / pi`.
    pub fn loewner_energy(&self) -> f64 {
        self.s1.value / PI
    }

    pub fn formula_values(&self) -> [(&'static str, f64); 5] {
        [
            ("s1", self.s1.value),
            ("s1_inverted", self.s1_inverted.value),
            ("s3", self.s3.value),
            ("e0_spherical", self.e0_spherical.value),
            ("frame_energy_form", self.frame_energy_form.value),
        ]
    }

    pub fn csv_header() -> &'static str {
        "curve_id,s1,s1_inverted,s3,e0_spherical,frame_energy_form,loewner_energy,grunsky_residual,max_residual,interior_residual,exterior_residual"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e},{:.3e}",
            self.metadata.curve_id,
            self.s1.value,
            self.s1_inverted.value,
            self.s3.value,
            self.e0_spherical.value,
            self.frame_energy_form.value,
            self.loewner_energy(),
            self.grunsky_residual,
            self.max_residual,
            self.metadata.interior_residual,
            self.metadata.exterior_residual,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Solve both maps of the (recentred) curve. Power-series curves centred at
/// 0 enter their interior map directly, bypassing the solver.
pub fn solve_curve_maps(
    curve: &ParametricCurve,
    cfg: &EnergyConfig,
) -> Result<(AnalyticDiskMap, AnalyticDiskMap, ParametricCurve, Complex64)> {
    if !curve.closed {
        return Err(Error::NotClosed);
    }
    let origin = Complex64::new(0.0, 0.0);
    let shift = if curve.contains(origin) {
        origin
    } else {
        -curve.interior_point()?
    };
    let recentred = if shift == origin {
        curve.clone()
    } else {
        curve.translated(shift)?
    };
    let f = match &recentred.kind {
        CurveKind::PowerSeriesImage { coeffs } if coeffs[0].norm() < 1e-12 => {
            AnalyticDiskMap::from_taylor_for_curve(coeffs.clone(), &recentred, cfg.solver.n)?
        }
        _ => solve_interior_with(&recentred, origin, &cfg.solver)?,
    };
    let g_tilde = solve_exterior_via_inversion(&recentred, &cfg.solver)?;
    Ok((f, g_tilde, recentred, shift))
}

/// Compute all five formula values, their pairwise residuals and the
/// identity residual for a closed curve. The curve is recentred so that 0
/// lies inside before solving.
pub fn full_report(curve: &ParametricCurve, cfg: &EnergyConfig) -> Result<EnergyReport> {
    let (f, g_tilde, recentred, shift) = solve_curve_maps(curve, cfg)?;
    let rule = cfg.rule()?;
    let s1_v = s1(&f, &g_tilde, &rule)?;
    let s1i_v = s1_inverted(&f, &g_tilde, &rule)?;
    let s3_v = s3(&f, &g_tilde, &rule)?;
    let e0_v = e0_spherical(&f, &g_tilde, &rule)?;
    let fe_v = frame_energy_form(&f, &g_tilde, &rule)?;
    let grunsky = grunsky_residual(&f, &g_tilde, &rule)?;

    let values = [
        ("s1", s1_v.value),
        ("s1_inverted", s1i_v.value),
        ("s3", s3_v.value),
        ("e0_spherical", e0_v.value),
        ("frame_energy_form", fe_v.value),
    ];
    let mut residuals = Vec::new();
    let mut max_residual: f64 = 0.0;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let diff = (values[i].1 - values[j].1).abs();
            max_residual = max_residual.max(diff);
            residuals.push(ResidualEntry {
                first: values[i].0,
                second: values[j].0,
                abs_difference: diff,
            });
        }
    }
    Ok(EnergyReport {
        s1: s1_v,
        s1_inverted: s1i_v,
        s3: s3_v,
        e0_spherical: e0_v,
        frame_energy_form: fe_v,
        grunsky_residual: grunsky,
        residuals,
        max_residual,
        metadata: ReportMetadata {
            curve_id: format!("{:016x}", recentred.id),
            center_shift: shift,
            solver_n: cfg.solver.n,
            solver_tol: cfg.solver.tol,
            quadrature_panels: cfg.panels,
            quadrature_gauss: cfg.gauss,
            quadrature_angles: cfg.angles,
            interior_residual: f.residual,
            interior_tail_bound: f.tail_bound,
            exterior_residual: g_tilde.residual,
            exterior_tail_bound: g_tilde.tail_bound,
        },
    })
}
