//! Loewner energy of Jordan curves via conformal maps and harmonic moving
//! frames.
//!
//! The crate computes the energy of a closed curve through four provably
//! equal routes — the plain-map action, its inverted-curve form, the
//! spherical action with log-weighted area terms, and the renormalised
//! energy of the explicit moving frames — and verifies the pointwise
//! identities the frames satisfy (Liouville equation, Cartan decomposition,
//! geodesic-curvature boundary relation, constrained harmonicity) at desk
//! scale.
//!
//! Modules mirror the pipeline: [`geometry`] holds curves and the
//! stereographic projection, [`conformal`] the boundary-correspondence
//! solver and welding, [`quadrature`] the deterministic disk rules,
//! [`energy`] the formula assemblies and cross-checks, and [`frames`] the
//! frame construction with its residual diagnostics.

pub mod conformal;
pub mod energy;
pub mod error;
pub mod frames;
pub mod geometry;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;
