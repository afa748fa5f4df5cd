//! Exponential polynomials `Σ P_j(z) e^{Q_j(z)}`: exact and floating-point
//! arithmetic, convex geometry of frequencies, argument-principle zero
//! counting, Nevanlinna functionals, factorization in the class of
//! exponential sums, linear differential equations and partial zeta sums.

pub mod error;
pub mod expr;
pub mod factor;
pub mod hullgeo;
pub mod nevan;
pub mod numeric;
pub mod odelab;
pub mod parallel;
pub mod strips;
pub mod zerolab;
pub mod zetalab;

pub use error::{Error, Result};
pub use expr::{parse, parse_exact, ExpPoly, GaussRational, Polynomial};
