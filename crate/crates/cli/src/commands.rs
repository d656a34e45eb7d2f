use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;

use loewner::conformal::welding;
use loewner::energy::{full_report, s1, solve_curve_maps, EnergyConfig};
use loewner::frames;
use loewner::geometry::{self, CurveKind};
use loewner::quadrature::{self, DiskQuadrature};

use crate::config::{CommonArgs, OutputFormat, RunConfig};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const LN2: f64 = std::f64::consts::LN_2;

fn stamp(cfg: &RunConfig) -> String {
    format!("config_sha256={} version={}", cfg.hash(), VERSION)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// `energy`: full report, JSON + CSV, exit 0 iff all residuals pass.
pub fn cmd_energy(args: &CommonArgs) -> Result<u8> {
    let cfg = args.resolve()?;
    let curve = cfg.build_curve()?;
    let report = full_report(&curve, &cfg.energy_config())?;

    if matches!(cfg.format, OutputFormat::Json | OutputFormat::Both) {
        let wrapped = serde_json::json!({
            "config_sha256": cfg.hash(),
            "version": VERSION,
            "report": serde_json::to_value(&report)?,
        });
        write_text(&cfg.out, "report.json", &serde_json::to_string_pretty(&wrapped)?)?;
    }
    if matches!(cfg.format, OutputFormat::Csv | OutputFormat::Both) {
        let csv = format!(
            "# {}\n{}\n{}\n",
            stamp(&cfg),
            loewner::energy::EnergyReport::csv_header(),
            report.csv_row()
        );
        write_text(&cfg.out, "report.csv", &csv)?;
    }

    println!("curve {}", cfg.curve);
    for (name, value) in report.formula_values() {
        println!("  {name:<18} I^L = {:+.12e}", value / PI);
    }
    if let Some(center) = cfg.center_value() {
        // the spherical route accepts any interior center; report the value
        // obtained with the requested one next to the default
        let ecfg = cfg.energy_config();
        let (_, g, recentred, shift) = solve_curve_maps(&curve, &ecfg)?;
        let f_c = loewner::conformal::solve_interior_with(&recentred, center + shift, &ecfg.solver)?;
        let v = loewner::energy::e0_spherical(&f_c, &g, &ecfg.rule()?)?;
        println!(
            "  e0 with center {center}: I^L = {:+.12e} (shift from default {:.3e})",
            v.value / PI,
            (v.value - report.e0_spherical.value).abs()
        );
    }
    println!("  grunsky residual   {:+.3e}", report.grunsky_residual);
    println!("  max pairwise residual {:.3e} (threshold {:.1e})", report.max_residual, cfg.threshold);

    let mut failed = false;
    for r in &report.residuals {
        if r.abs_difference >= cfg.threshold {
            eprintln!(
                "FAIL residual |{} - {}| = {:.3e} >= {:.1e}",
                r.first, r.second, r.abs_difference, cfg.threshold
            );
            failed = true;
        }
    }
    if cfg.verify.grunsky && report.grunsky_residual.abs() >= cfg.threshold {
        eprintln!(
            "FAIL grunsky residual {:.3e} >= {:.1e}",
            report.grunsky_residual.abs(),
            cfg.threshold
        );
        failed = true;
    }
    Ok(if failed { 1 } else { 0 })
}

struct ResidualLine {
    name: &'static str,
    value: f64,
    threshold: f64,
}

/// `frames`: run the frame-identity suite, write trace CSVs, exit 0 iff all
/// residual maxima stay below their thresholds. A spiral curve runs the
/// spiral diagnostics instead.
pub fn cmd_frames(args: &CommonArgs) -> Result<u8> {
    let cfg = args.resolve()?;
    let curve = cfg.build_curve()?;

    if let CurveKind::SpiralArc { epsilon } = curve.kind {
        let value = frames::spiral_diagnostics(epsilon)?;
        let bound = frames::spiral_energy_bound();
        println!("spiral half-disk energy {value:.9} bound {bound:.9}");
        for t in [1e-2, 1e-3] {
            let direct =
                frames::geodesic_curvature_halfplane(&[frames::spiral_pre_schwarzian(
                    Complex64::new(t, 0.0),
                )])[0];
            println!(
                "  curvature at t = {t:.0e}: {direct:+.9e} (closed form {:+.9e})",
                frames::spiral_curvature(t)
            );
        }
        return Ok(if value < bound { 0 } else { 1 });
    }

    let (f, _g, _recentred, _shift) = solve_curve_maps(&curve, &cfg.energy_config())?;

    // orthonormality over a polar grid, excluding the puncture
    let mut ortho_max: f64 = 0.0;
    let mut frame_rows = String::from(
        "z_re,z_im,u_x,u_y,u_z,v_x,v_y,v_z,n_x,n_y,n_z,mu,cartan_re,cartan_im,orthonormality,cartan_residual\n",
    );
    for &r in &[0.3, 0.6, 0.9] {
        for j in 0..64 {
            let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / 64.0);
            let s = frames::frame_at(&f, z)?;
            ortho_max = ortho_max.max(s.residuals.orthonormality);
            frame_rows.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3e},{:.3e}\n",
                z.re, z.im, s.u.x, s.u.y, s.u.z, s.v.x, s.v.y, s.v.z, s.n.x, s.n.y, s.n.z,
                s.mu, s.cartan.re, s.cartan.im, s.residuals.orthonormality, s.residuals.cartan
            ));
        }
    }

    let mut cartan_max: f64 = 0.0;
    for j in 0..512 {
        let z = Complex64::from_polar(0.9, 2.0 * PI * j as f64 / 512.0);
        cartan_max = cartan_max.max(frames::cartan_residual(&f, z)?.norm());
    }

    let pts: Vec<Complex64> = (0..24)
        .map(|k| Complex64::from_polar(0.25 + 0.02 * k as f64, 0.7 * k as f64))
        .collect();
    let liou = frames::liouville_residual(&f, &pts, 1e-3)?;
    let liou_max = liou.iter().cloned().fold(0.0, f64::max);
    let liou_fine = frames::liouville_residual(&f, &pts, 5e-4)?;
    let liou_ratio = liou_max / liou_fine.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);

    let mut harm_max: f64 = 0.0;
    for &z in pts.iter().take(8) {
        let h = frames::harmonicity_residuals(&f, z, 1e-3)?;
        harm_max = harm_max.max(h.im_phi.max(h.im_phi_bar));
    }

    let neu = frames::neumann_residual(&f, 128, 0.999, 1e-4)?;
    let neu_max = neu.iter().map(|v| v.abs()).fold(0.0, f64::max);

    let trace = frames::geodesic_curvature_disk(&f, cfg.angles, 1.0 - 1e-6)?;
    let trace_fine = frames::geodesic_curvature_disk(&f, cfg.angles * 2, 1.0 - 1e-6)?;
    let sob_rel = if trace_fine.sobolev_minus_half > 0.0 {
        (trace.sobolev_minus_half - trace_fine.sobolev_minus_half).abs()
            / trace_fine.sobolev_minus_half
    } else {
        0.0
    };

    let traces_dir = cfg.out.join("traces");
    write_text(&traces_dir, "curvature.csv", &format!("# {}\n{}", stamp(&cfg), trace.to_csv()))?;
    write_text(&traces_dir, "frame_samples.csv", &format!("# {}\n{frame_rows}", stamp(&cfg)))?;

    let lines = [
        ResidualLine { name: "orthonormality", value: ortho_max, threshold: 1e-12 },
        ResidualLine { name: "cartan (512 pts, r=0.9)", value: cartan_max, threshold: 1e-9 },
        ResidualLine { name: "liouville (h=1e-3)", value: liou_max, threshold: 1e-4 },
        ResidualLine { name: "harmonicity (h=1e-3)", value: harm_max, threshold: 1e-4 },
        ResidualLine { name: "neumann (r=0.999)", value: neu_max, threshold: 1e-4 },
        ResidualLine { name: "curvature H^-1/2 doubling", value: sob_rel, threshold: 1e-4 },
    ];
    let mut failed = false;
    for l in &lines {
        let ok = l.value < l.threshold;
        println!(
            "{} {:<28} {:.3e} (threshold {:.0e})",
            if ok { "PASS" } else { "FAIL" },
            l.name,
            l.value,
            l.threshold
        );
        failed |= !ok;
    }
    println!(
        "info liouville h-ratio {liou_ratio:.2} (expected ~4), H^-1/2(k) = {:.6e}",
        trace.sobolev_minus_half
    );
    Ok(if failed { 1 } else { 0 })
}

/// `convergence`: S1 over the shrink family and over quadrature resolution
/// doublings. The curve must be an explicit Taylor map (`poly:...`).
pub fn cmd_convergence(args: &CommonArgs) -> Result<u8> {
    let cfg = args.resolve()?;
    let curve = cfg.build_curve()?;
    let coeffs = match &curve.kind {
        CurveKind::PowerSeriesImage { coeffs } => coeffs.clone(),
        _ => anyhow::bail!("convergence requires a curve given as an explicit Taylor map (poly:...)"),
    };
    let ecfg = cfg.energy_config();
    let rule = ecfg.rule()?;
    let f = loewner::conformal::AnalyticDiskMap::from_taylor_for_curve(
        coeffs.clone(),
        &curve,
        cfg.n,
    )?;
    let g = loewner::conformal::solve_exterior_via_inversion(&curve, &ecfg.solver)?;
    let base = s1(&f, &g, &rule)?.value;

    let mut table = format!("# {}\nblock,eps,n,panels,gauss,angles,loewner_energy,successive_difference\n", stamp(&cfg));
    println!("shrink family (base I^L = {:.12e})", base / PI);
    let mut prev: Option<f64> = None;
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let fe = f.shrink(eps)?;
        let shrunk = geometry::family::power_series_image(fe.taylor().to_vec(), cfg.n)?;
        let mut fe = fe;
        fe.curve_id = Some(shrunk.id);
        let ge = loewner::conformal::solve_exterior_via_inversion(&shrunk, &ecfg.solver)?;
        let v = s1(&fe, &ge, &rule)?.value;
        let diff = prev.map(|p| (v - p).abs());
        println!(
            "  eps {eps:>7.0e}  I^L {:+.12e}  diff {}",
            v / PI,
            diff.map(|d| format!("{d:.3e}")).unwrap_or_else(|| "-".into())
        );
        table.push_str(&format!(
            "shrink,{eps},{},{},{},{},{:.17e},{}\n",
            cfg.n,
            cfg.panels,
            cfg.gauss,
            cfg.angles,
            v / PI,
            diff.map(|d| format!("{d:.3e}")).unwrap_or_default()
        ));
        prev = Some(v);
    }

    println!("quadrature resolution ladder");
    let mut prev: Option<f64> = None;
    for level in 0..4 {
        let scale = 1usize << level;
        let lcfg = EnergyConfig {
            solver: loewner::conformal::SolverConfig {
                n: 256 * scale,
                tol: cfg.tol,
                max_iterations: cfg.max_iterations,
            },
            panels: 2 * scale,
            gauss: 4 * scale,
            angles: 64 * scale,
        };
        let lrule = lcfg.rule()?;
        let lcurve = geometry::family::power_series_image(coeffs.clone(), 256 * scale)?;
        let lf = loewner::conformal::AnalyticDiskMap::from_taylor_for_curve(
            coeffs.clone(),
            &lcurve,
            lcfg.solver.n,
        )?;
        let lg = loewner::conformal::solve_exterior_via_inversion(&lcurve, &lcfg.solver)?;
        let v = s1(&lf, &lg, &lrule)?.value;
        let diff = prev.map(|p| (v - p).abs());
        println!(
            "  level {level} (panels {:>2}, gauss {:>2}, angles {:>4})  I^L {:+.12e}  diff {}",
            lcfg.panels,
            lcfg.gauss,
            lcfg.angles,
            v / PI,
            diff.map(|d| format!("{d:.3e}")).unwrap_or_else(|| "-".into())
        );
        table.push_str(&format!(
            "resolution,,{},{},{},{},{:.17e},{}\n",
            lcfg.solver.n,
            lcfg.panels,
            lcfg.gauss,
            lcfg.angles,
            v / PI,
            diff.map(|d| format!("{d:.3e}")).unwrap_or_default()
        ));
        prev = Some(v);
    }
    write_text(&cfg.out, "convergence.csv", &table)?;
    Ok(0)
}

struct AuditItem {
    name: &'static str,
    computed: f64,
    expected: f64,
}

fn audit_items(rule: &DiskQuadrature) -> Result<Vec<AuditItem>> {
    let mut items = Vec::new();
    items.push(AuditItem {
        name: "eq7_gradient_psi",
        computed: rule.integrate_disk(|z| 4.0 * z.norm_sqr() / (1.0 + z.norm_sqr()).powi(2))?,
        expected: 4.0 * PI * LN2 - 2.0 * PI,
    });
    items.push(AuditItem {
        name: "optimal2_log_weight",
        computed: rule.integrate_log_weighted(|z| 4.0 / (1.0 + z.norm_sqr()).powi(2))?,
        expected: -2.0 * PI * LN2,
    });
    // |grad mu|^2 for mu = -log(1+|z|^2), assembled from dz mu = -conj(z)/(1+|z|^2)
    items.push(AuditItem {
        name: "optimal3_dirichlet_mu",
        computed: rule.integrate_disk(|z| {
            let dz_mu = -z.conj() / (1.0 + z.norm_sqr());
            4.0 * dz_mu.norm_sqr()
        })?,
        expected: 4.0 * PI * LN2 - 2.0 * PI,
    });
    // |grad pi^{-1}(0)| by central differences of the sphere coordinates
    let h = 1e-6;
    let grad_sq = {
        let px = geometry::inverse_stereographic(Complex64::new(h, 0.0));
        let mx = geometry::inverse_stereographic(Complex64::new(-h, 0.0));
        let py = geometry::inverse_stereographic(Complex64::new(0.0, h));
        let my = geometry::inverse_stereographic(Complex64::new(0.0, -h));
        let dx = [
            (px.x - mx.x) / (2.0 * h),
            (px.y - mx.y) / (2.0 * h),
            (px.z - mx.z) / (2.0 * h),
        ];
        let dy = [
            (py.x - my.x) / (2.0 * h),
            (py.y - my.y) / (2.0 * h),
            (py.z - my.z) / (2.0 * h),
        ];
        dx.iter().map(|v| v * v).sum::<f64>() + dy.iter().map(|v| v * v).sum::<f64>()
    };
    items.push(AuditItem {
        name: "stereographic_gradient",
        computed: grad_sq.sqrt(),
        expected: 2.0 * 2.0f64.sqrt(),
    });
    items.push(AuditItem {
        name: "hemisphere_area",
        computed: rule.integrate_disk(|z| 4.0 / (1.0 + z.norm_sqr()).powi(2))?,
        expected: 2.0 * PI,
    });
    // spherical action of the circle assembled from its three pieces
    let part_a = rule.integrate_disk(|z| 8.0 * z.norm_sqr() / (1.0 + z.norm_sqr()).powi(2))?;
    let part_b =
        rule.integrate_log_weighted(|z| 16.0 * z.norm_sqr() / (1.0 + z.norm_sqr()).powi(2))?;
    items.push(AuditItem {
        name: "spherical_action_circle",
        computed: part_a + part_b + 4.0 * PI,
        expected: 0.0,
    });
    let id = loewner::conformal::AnalyticDiskMap::from_taylor(vec![
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])?;
    items.push(AuditItem {
        name: "grunsky_circle",
        computed: loewner::energy::grunsky_residual(&id, &id, rule)?,
        expected: 0.0,
    });
    items.push(AuditItem {
        name: "exterior_log_flip",
        computed: rule
            .integrate_exterior(|z| 4.0 * z.norm().ln() / (1.0 + z.norm_sqr()).powi(2))?,
        expected: 2.0 * PI * LN2,
    });
    items.push(AuditItem {
        name: "exterior_power_law",
        computed: rule.integrate_exterior(|z| z.norm().powi(-6))?,
        expected: PI / 2.0,
    });
    Ok(items)
}

/// `audit`: compare every closed-form constant with its computed value; exit
/// 0 iff all pass at the tolerance (default 1e-9).
pub fn cmd_audit(args: &CommonArgs) -> Result<u8> {
    let cfg = args.resolve()?;
    let tol = args.threshold.unwrap_or(1e-9);
    let rule = quadrature::disk_rule(cfg.panels, cfg.gauss, cfg.angles)?;
    let mut failures = 0usize;
    let mut shown = 0usize;
    for item in audit_items(&rule)? {
        if let Some(only) = &args.only {
            if !item.name.contains(only.as_str()) {
                continue;
            }
        }
        shown += 1;
        let err = (item.computed - item.expected).abs();
        let ok = err < tol;
        if !ok {
            failures += 1;
        }
        println!(
            "{} {:<26} computed {:+.15e} expected {:+.15e} |err| {:.3e}",
            if ok { "PASS" } else { "FAIL" },
            item.name,
            item.computed,
            item.expected,
            err
        );
    }
    if shown == 0 {
        anyhow::bail!("no audit constant matches `{}`", args.only.as_deref().unwrap_or(""));
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

/// Moebius-invariance check used by the energy verification toggles.
#[allow(dead_code)]
pub fn moebius_check(curve: &geometry::ParametricCurve, cfg: &EnergyConfig) -> Result<f64> {
    let report = full_report(curve, cfg)?;
    let inverted = curve.inverted()?;
    let report_inv = full_report(&inverted, cfg)?;
    Ok((report.s1.value - report_inv.s1.value).abs())
}

/// Welding diagnostics shared by tests: the H^{1/2} seminorm of `log w'`.
#[allow(dead_code)]
pub fn welding_seminorm(curve: &geometry::ParametricCurve, cfg: &EnergyConfig) -> Result<f64> {
    let (f, g, _, _) = solve_curve_maps(curve, cfg)?;
    let weld = welding(&f, &g)?;
    Ok(quadrature::sobolev_seminorm(&weld.log_derivative, 0.5))
}
