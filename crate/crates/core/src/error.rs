use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by curve construction, map solving, quadrature and frame
/// evaluation. Variants carry enough context to name the offending input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("stereographic projection is undefined at the north pole")]
    NorthPole,

    #[error("curve passes through the origin (min |gamma| = {min_abs:.3e})")]
    CurveThroughOrigin { min_abs: f64 },

    #[error("invalid {kind} parameter: {msg}")]
    InvalidParameter { kind: &'static str, msg: String },

    #[error("sampled curve self-intersects ({crossings} segment crossings at resolution {n})")]
    SelfIntersecting { crossings: usize, n: usize },

    #[error("curve is not closed; operation requires a Jordan curve")]
    NotClosed,

    #[error("center {center} is not strictly inside the curve")]
    CenterOutside { center: Complex64 },

    #[error("curve is not star-like about {center}; the boundary-correspondence solver requires a single-valued radial function")]
    NotStarLike { center: Complex64 },

    #[error("boundary-correspondence iteration did not converge after {iterations} iterations (last update {delta:.3e}, residual {residual:.3e}, tol {tol:.3e})")]
    NoConvergence {
        iterations: usize,
        delta: f64,
        residual: f64,
        tol: f64,
    },

    #[error("evaluation point |z| = {abs:.6} exceeds the map's radius {r_max:.6}")]
    OutOfRadius { abs: f64, r_max: f64 },

    #[error("map has nonzero constant term a0 = {a0}; this operation requires f(0) = 0")]
    NonzeroConstantTerm { a0: Complex64 },

    #[error("degenerate map: |derivative at the normalization point| = {value:.3e} below 1e-12")]
    DegenerateMap { value: f64 },

    #[error("derivative of the map is not univalent: f' has {zeros} zero(s) in the closed disk")]
    NonUnivalent { zeros: usize },

    #[error("non-finite integrand sample at node z = {z}")]
    NonFiniteSample { z: Complex64 },

    #[error("the two maps target different curve parametrizations (ids {first:#x} vs {second:#x})")]
    MismatchedCurves { first: u64, second: u64 },

    #[error("boundary correspondence is missing; the map was not produced by a boundary solve")]
    MissingCorrespondence,

    #[error("welding lift is not strictly increasing at node {index}")]
    NonMonotoneWelding { index: usize },

    #[error("vanishing map derivative at z = {z}")]
    VanishingDerivative { z: Complex64 },

    #[error("frame is undefined at the puncture: |z| = {abs:.3e} is below 1e-6")]
    OriginInput { abs: f64 },

    #[error("finite-difference stencil leaves the evaluation domain (|z| = {abs:.6}, spacing {h:.3e})")]
    StencilOutsideDomain { abs: f64, h: f64 },

    #[error("evaluation radius {r:.6} with spacing {h:.3e} leaves (0, 1)")]
    RadiusError { r: f64, h: f64 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to: 3 for quadrature
    /// failures, 2 for solver/validation failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFiniteSample { .. } => 3,
            _ => 2,
        }
    }
}
