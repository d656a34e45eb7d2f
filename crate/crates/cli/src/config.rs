use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use loewner::conformal::SolverConfig;
use loewner::energy::EnergyConfig;
use loewner::geometry::{CurveKind, ParametricCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyToggles {
    pub frames: bool,
    pub grunsky: bool,
    pub convergence: bool,
    pub moebius: bool,
}

impl Default for VerifyToggles {
    fn default() -> Self {
        VerifyToggles {
            frames: true,
            grunsky: true,
            convergence: false,
            moebius: false,
        }
    }
}

/// Resolved run configuration; the JSON config file mirrors this structure
/// and individual flags override its fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub curve: String,
    pub center: Option<[f64; 2]>,
    pub n: usize,
    pub tol: f64,
    pub max_iterations: usize,
    pub panels: usize,
    pub gauss: usize,
    pub angles: usize,
    pub format: OutputFormat,
    pub out: PathBuf,
    pub threshold: f64,
    pub verify: VerifyToggles,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            curve: "circle".into(),
            center: None,
            n: 1024,
            tol: 1e-12,
            max_iterations: 200,
            panels: 8,
            gauss: 16,
            angles: 512,
            format: OutputFormat::Both,
            out: PathBuf::from("out"),
            threshold: 1e-5,
            verify: VerifyToggles::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() {
            bail!("n = {} is not a power of two", self.n);
        }
        if !(self.tol > 0.0) {
            bail!("tol must be positive");
        }
        Ok(())
    }

    pub fn energy_config(&self) -> EnergyConfig {
        EnergyConfig {
            solver: SolverConfig {
                n: self.n,
                tol: self.tol,
                max_iterations: self.max_iterations,
            },
            panels: self.panels,
            gauss: self.gauss,
            angles: self.angles,
        }
    }

    /// SHA-256 of the canonical JSON encoding; stamped into every output
    /// file for reproducibility.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }

    pub fn build_curve(&self) -> Result<ParametricCurve> {
        parse_curve(&self.curve, self.n).with_context(|| format!("curve spec `{}`", self.curve))
    }

    pub fn center_value(&self) -> Option<Complex64> {
        self.center.map(|[re, im]| Complex64::new(re, im))
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Curve spec: `circle[:R[@cx,cy]]`, `ellipse:RHO[@cx,cy]`,
    /// `poly:a1,a2,...`, `spiral:EPS`, or `file:PATH.json`
    #[arg(long)]
    pub curve: Option<String>,
    /// Interior center `re,im` for the interior solve
    #[arg(long)]
    pub center: Option<String>,
    /// Boundary nodes of the solver (power of two)
    #[arg(long)]
    pub n: Option<usize>,
    /// Boundary residual tolerance of the solver
    #[arg(long)]
    pub tol: Option<f64>,
    /// Radial panels of the disk quadrature
    #[arg(long)]
    pub panels: Option<usize>,
    /// Gauss nodes per radial panel
    #[arg(long)]
    pub gauss: Option<usize>,
    /// Uniform angles of the disk quadrature
    #[arg(long)]
    pub angles: Option<usize>,
    /// Output format: json | csv | both
    #[arg(long)]
    pub format: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Restrict the audit to one named constant
    #[arg(long)]
    pub only: Option<String>,
    /// Pass/fail threshold (residuals for `energy`, constants for `audit`)
    #[arg(long)]
    pub threshold: Option<f64>,
    /// JSON config file mirroring the run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str(&text).context("parsing config file")?
            }
            None => RunConfig::default(),
        };
        if let Some(curve) = &self.curve {
            cfg.curve = curve.clone();
        }
        if let Some(center) = &self.center {
            let c = parse_complex(center)?;
            cfg.center = Some([c.re, c.im]);
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        if let Some(p) = self.panels {
            cfg.panels = p;
        }
        if let Some(g) = self.gauss {
            cfg.gauss = g;
        }
        if let Some(a) = self.angles {
            cfg.angles = a;
        }
        if let Some(f) = &self.format {
            cfg.format = match f.as_str() {
                "json" => OutputFormat::Json,
                "csv" => OutputFormat::Csv,
                "both" => OutputFormat::Both,
                other => bail!("unknown format `{other}` (expected json, csv, or both)"),
            };
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if let Some(t) = self.threshold {
            cfg.threshold = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.trim().parse()?, 0.0)),
        [re, im] => Ok(Complex64::new(re.trim().parse()?, im.trim().parse()?)),
        _ => bail!("expected `re` or `re,im`, got `{text}`"),
    }
}

/// Parse a command-line curve spec into a curve sampled at `n` points.
pub fn parse_curve(spec: &str, n: usize) -> Result<ParametricCurve> {
    let (head, rest) = match spec.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (spec, None),
    };
    let curve = match head {
        "circle" => {
            let (radius, center) = match rest {
                None => (1.0, Complex64::new(0.0, 0.0)),
                Some(r) => parse_scalar_with_center(r)?,
            };
            ParametricCurve::new(CurveKind::Circle { radius, center }, n)?
        }
        "ellipse" => {
            let body = rest.context("ellipse needs a parameter, e.g. ellipse:0.2")?;
            let (rho, center) = parse_scalar_with_center(body)?;
            ParametricCurve::new(CurveKind::Ellipse { rho, center }, n)?
        }
        "poly" => {
            let body = rest.context("poly needs coefficients, e.g. poly:1,0,0.1")?;
            let mut coeffs = vec![Complex64::new(0.0, 0.0)];
            for part in body.split(',') {
                coeffs.push(Complex64::new(
                    part.trim().parse::<f64>().context("polynomial coefficient")?,
                    0.0,
                ));
            }
            ParametricCurve::new(CurveKind::PowerSeriesImage { coeffs }, n)?
        }
        "spiral" => {
            let eps: f64 = rest.context("spiral needs epsilon")?.trim().parse()?;
            ParametricCurve::new(CurveKind::SpiralArc { epsilon: eps }, n)?
        }
        "file" => {
            let path = rest.context("file needs a path")?;
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading curve file {path}"))?;
            ParametricCurve::from_json(&text)?
        }
        other => bail!("unknown curve kind `{other}`"),
    };
    Ok(curve)
}

fn parse_scalar_with_center(text: &str) -> Result<(f64, Complex64)> {
    match text.split_once('@') {
        Some((scalar, center)) => Ok((scalar.trim().parse()?, parse_complex(center)?)),
        None => Ok((text.trim().parse()?, Complex64::new(0.0, 0.0))),
    }
}
