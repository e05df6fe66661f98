//! Numerical laboratory for the prescribed-curvature type equation
//! `Δu + h·u = λ·f·u^{(n+2)/(n−2)}` on model compact manifolds.
//!
//! The crate computes sharp Sobolev constants and the energy threshold,
//! minimizes the quotient `J_{h,f}` with a normalized gradient flow,
//! classifies potentials `h` as subcritical or weakly critical, locates
//! critical functions by bisection along `h − t`, measures concentration of
//! blowing-up solution families, and computes the three-dimensional Green
//! function mass.

pub mod concentration;
pub mod conformal;
pub mod criticality;
pub mod error;
pub mod functional;
pub mod green3;
pub mod linalg;
pub mod manifold;
pub mod sobolev;
pub mod solver;

pub use error::{Error, Result};
